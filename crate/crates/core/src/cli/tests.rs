use super::*;

fn cfg(items: &[&str], dir: &Path) -> JobConfig {
    let mut c = JobConfig::default();
    c.apply_overrides(items).unwrap();
    c.out = dir.join("job");
    c
}

#[test]
fn cylinder_run_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(&["problem=cmc-revolution", "rho=1", "H=-0.5", "n=21"], dir.path());
    let d = run(&c).unwrap();
    assert!(d.pass, "{}", d.summary());
    assert_eq!(d.case, "cmc-spacelike");
    for p in [mesh_paths(&c.out, 0, 1).0, mesh_paths(&c.out, 0, 1).1, diagnostics_path(&c.out), cache_path(&c.out)] {
        assert!(p.exists(), "{}", p.display());
    }
    let again = check(&c.out).unwrap();
    assert_eq!(again, d);
}

#[test]
fn perturbed_mesh_fails_check() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(&["problem=cmc-revolution", "H=-0.5", "n=21"], dir.path());
    run(&c).unwrap();
    let csv = mesh_paths(&c.out, 0, 1).1;
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 2;
    let mut f: Vec<String> = lines[mid].split(',').map(String::from).collect();
    let z: f64 = f[6].parse().unwrap();
    f[6] = fmt_g17(z + 1e-3);
    lines[mid] = f.join(",");
    std::fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let d = check(&c.out).unwrap();
    assert!(!d.pass);
    assert!(!d.meshes[0].report.get("mean_curvature").unwrap().pass);
}

#[test]
fn runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let items = ["problem=psph", "curve=helix", "n=17", "obj=false"];
    run(&cfg(&items, a.path())).unwrap();
    run(&cfg(&items, b.path())).unwrap();
    for name in ["job.csv", "job.diagnostics.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(x == y, "{name} differs");
    }
}

#[test]
fn associated_family_writes_one_mesh_per_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let c = cfg(&["problem=cmc", "curve=lorentz-helix", "H=0.7", "n=17", "lambda=1,1.5"], dir.path());
    let d = run(&c).unwrap();
    assert_eq!(d.meshes.len(), 2);
    assert!(d.meshes[1].report.get("cauchy.position").is_none());
    assert!(d.meshes[1].report.get("mean_curvature").is_some());
    assert!(mesh_paths(&c.out, 1, 2).0.exists());
}

#[test]
fn null_and_asymptotic_problems_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = run(&cfg(&["problem=cmc-null", "alpha=1", "beta=0", "H=0.5", "n=21"], dir.path())).unwrap();
    assert!(d.meshes[0].report.get("cauchy.second_curve").unwrap().pass, "{}", d.summary());
    let d = run(&cfg(&["problem=psph-asymptotic", "alpha=0.4+0.1*i*y", "n=21"], dir.path())).unwrap();
    assert!(d.meshes[0].report.get("cauchy.second_curve").unwrap().pass, "{}", d.summary());
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |items: &[&str]| exit_code(&run(&cfg(items, dir.path())).unwrap_err());
    assert_eq!(code(&["problem=cmc", "curve=lcircle"]), 2);
    assert_eq!(code(&["problem=cmc", "curve=nosuch", "H=1"]), 2);
    assert_eq!(code(&["problem=cmc", "curve=parabola", "H=1"]), 2);
    assert_eq!(code(&["problem=psph", "curve=line"]), 3);
    assert_eq!(code(&["problem=cmc-null", "curve=null-axis", "H=0.7"]), 3);
    assert_eq!(code(&["problem=cmc-null", "alpha=0"]), 3);
    assert_eq!(exit_code(&check(&dir.path().join("missing")).unwrap_err()), 2);
}

#[test]
fn geodesic_flag_requires_the_principal_normal() {
    let dir = tempfile::tempdir().unwrap();
    let d = run(&cfg(&["problem=psph", "curve=circle", "geodesic=true", "n=21"], dir.path())).unwrap();
    assert!(d.meshes[0].report.get("geodesic").unwrap().pass);
    let csv = dir.path().join("c.csv");
    let mut s = String::from("t,fx,fy,fz,vx,vy,vz\n");
    for k in 0..41 {
        let t = -1.0 + k as f64 / 20.0;
        let (sn, cs) = f64::sin_cos(t);
        // circle with a tilted normal
        let n = [-sn * 0.8, -cs * 0.8, 0.6];
        s += &format!("{t},{},{},0,{},{},{}\n", sn, cs, n[0], n[1], n[2]);
    }
    std::fs::write(&csv, s).unwrap();
    let c = cfg(&["problem=psph", &format!("curve_csv={}", csv.display()), "geodesic=true", "n=21"], dir.path());
    assert_eq!(exit_code(&run(&c).unwrap_err()), 3);
}

#[test]
fn sweep_reports_second_order() {
    let c = cfg(&["problem=psph", "curve=circle"], Path::new("."));
    let s = sweep(&c, &[21, 41]).unwrap();
    let r = s.rates("gauss_curvature")[0].unwrap();
    assert!((1.8..2.2).contains(&r), "{r}");
    assert!(s.table().contains("gauss_curvature"));
}
