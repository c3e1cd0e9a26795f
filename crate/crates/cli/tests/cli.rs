use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-wavelets")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn isometry_of_u() {
    let o = run(&["verify-isometry", "--matrix", "U", "--metric", "standard"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("deformed isometry true"), "{text}");
    assert!(text.contains("oracle trials 1000 seed 1 isometry true"));
}

#[test]
fn non_triangular_matrix_under_the_flag() {
    let o = run(&["verify-isometry", "--matrix", "1,1;1,0", "--metric", "flag", "--trials", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("deformed isometry false") && text.contains("isometry false\n"), "{text}");
    let id = run(&["verify-isometry", "--matrix", "identity"]);
    assert!(stdout(&id).contains("deformed isometry true"));
}

#[test]
fn dilation_verdicts() {
    let s = run(&["verify-dilation", "--matrix", "S", "--metric", "s"]);
    assert_eq!(s.status.code(), Some(0));
    assert!(stdout(&s).contains("verdict dilation\n"));
    let q = run(&["verify-dilation", "--matrix", "Q", "--metric", "s"]);
    assert_eq!(q.status.code(), Some(1));
    assert!(stdout(&q).contains("witness"));
    let q = run(&["verify-dilation", "--matrix", "Q", "--metric", "s", "--expect", "false"]);
    assert_eq!(q.status.code(), Some(0));
    let q = run(&["verify-dilation", "--matrix", "Q", "--metric", "1/2,0@1,0;1,1"]);
    assert_eq!(q.status.code(), Some(0));
}

#[test]
fn metric_file() {
    let dir = std::env::temp_dir().join(format!("padic-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("q.toml");
    std::fs::write(&path, "prime = 2\ndimension = 2\nweights = [\"1/2\", \"0\"]\nconjugation = [[1, 0], [1, 1]]\n").unwrap();
    let o = run(&["verify-dilation", "--matrix", "Q", "--metric", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn parseval_prints_the_partial_sum() {
    let o = run(&["parseval", "--prime", "2", "--scales", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sum 255/256\n"));
    let o = run(&["parseval", "--prime", "3", "--matrix", "cyclic", "--dim", "2", "--scales", "4"]);
    assert!(stdout(&o).contains("sum 80/81\n"));
}

#[test]
fn basis_and_export() {
    let dir = std::env::temp_dir().join(format!("padic-basis-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("mother.txt");
    let o = run(&["basis", "--matrix", "S", "--metric", "s", "--scales", "1", "--depth", "1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("family 12 pairs 78 failures 0"), "{}", stdout(&o));
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("wavelet k=(1,0) j=0"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn spectral_rows() {
    let o = run(&["spectral", "--matrix", "Q", "--metric", "q", "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("fourier mother k=[0, 1] ok"));
    assert_eq!(text.matches("\neigen ").count(), 12);
    assert!(!text.contains("FAIL"));
}

#[test]
fn monna_rows_and_csv() {
    let dir = std::env::temp_dir().join(format!("padic-monna-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("tile.csv");
    let o = run(&["monna", "--matrix", "Q", "--series-depth", "14", "--grid", "4", "--csv", csv.to_str().unwrap()]);
    let text = stdout(&o);
    assert!(text.contains("measure m=4 outer"), "{text}");
    assert_eq!(text.matches("condition B").count(), 8);
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("# p=2 A=[1,-1;1,1] digits=(0,0) (0,1) T=14 m=4\nx1,x2\n"));
    assert_eq!(body.lines().count(), 2 + (1 << 14));
    std::fs::remove_dir_all(dir).unwrap();

    let one = run(&["monna", "--matrix", "2", "--series-depth", "12", "--grid", "6"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(stdout(&one).contains("0,1/2,1\n1/2,1,-1\n"));
    let wide = run(&["monna", "--matrix", "2", "--digits", "0;3", "--series-depth", "12", "--grid", "6"]);
    assert_eq!(wide.status.code(), Some(1));
    assert!(stdout(&wide).contains("condition A bracket false"));
}

#[test]
fn configuration_errors_exit_with_two() {
    assert_eq!(run(&["monna", "--series-depth", "23"]).status.code(), Some(2));
    assert_eq!(run(&["parseval", "--matrix", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["verify-dilation", "--matrix", "S", "--metric", "1/2"]).status.code(), Some(2));
    assert_eq!(run(&["monna", "--matrix", "1/2,0;0,4"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify-isometry", "--matrix", "3,1;6,2", "--prime", "3", "--seed", "7", "--trials", "300"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["spectral", "--matrix", "S", "--metric", "s", "--alpha", "1/2"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn report_file() {
    let dir = std::env::temp_dir().join(format!("padic-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.txt");
    let o = run(&["parseval", "--prime", "3", "--scales", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(std::fs::read(&out).unwrap(), o.stdout);
    std::fs::remove_dir_all(dir).unwrap();
}
