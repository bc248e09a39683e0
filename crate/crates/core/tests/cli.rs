use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wente-lab"))
}

const CONFIG: &str = "family = linf_blowup\nbeta = 0.75, 0.6\neps = 1e-1, 1e-2, 1e-3\nn = 8, 16\n";

#[test]
fn check_exits_zero() {
    let out = bin().args(["check", "--seed", "11"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 8 && text.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn sweep_with_missing_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("sweep").arg(dir.path().join("absent.cfg")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_with_bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, CONFIG.replace("eps = 1e-1, 1e-2, 1e-3", "eps =")).unwrap();
    let out = bin().arg("sweep").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    let out = bin()
        .args(["solve", "--family", "linf_blowup", "--beta", "0.25", "--eps", "1e-2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_emits_field_and_norms() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("w.csv");
    let norms = dir.path().join("norms.csv");
    let out = bin()
        .args(["solve", "--family", "dirichlet_control", "--beta", "0.75", "--eps", "1e-3", "--n", "16"])
        .arg("--output")
        .arg(&field)
        .arg("--norms")
        .arg(&norms)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let field = fs::read_to_string(field).unwrap();
    assert_eq!(field.lines().next(), Some("x1,x2,value"));
    assert_eq!(field.lines().count(), 1 + 16 * 32);
    let norms = fs::read_to_string(norms).unwrap();
    assert_eq!(norms.lines().next(), Some("norm,value,n_r,n_theta"));
    assert!(norms.contains("\nseminorm_b_h1,"));
}

#[test]
fn sweep_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("out{k}.csv"));
        let cfg = dir.path().join(format!("sweep{k}.cfg"));
        fs::write(&cfg, format!("{CONFIG}output = {}\n", csv.display())).unwrap();
        let out = bin().arg("--seed").arg("5").arg("sweep").arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8(out.stdout).unwrap().contains("fits"));
        outputs.push(fs::read(csv).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let text = String::from_utf8(outputs.remove(0)).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,beta,eps,n,norm_a_inf,seminorm_a_h1,seminorm_b_h1,lorentz_b,linf_u,w_origin,l2_grad_w,lorentz_grad_w,h12_trace,ratio_dirichlet,ratio_neumann,ratio_l21,defect")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[0][1..4], ["0.6", "0.001", "8"]);
    assert!(rows.iter().all(|r| r.len() == 17));
}
