//! Evaluate JSON job descriptions the way `maslov compute` does.

use maslov::job::{parse_job, run_job, to_json, Overrides};

const JOBS: [&str; 4] = [
    r#"{"n":1,"index":"spectral-flow","path":{"kind":"graph_polynomial","coefficients":[[[-1.0]],[[2.0]]]}}"#,
    r#"{"n":1,"index":"lagrangian","path":{"kind":"rotation","angles":[3.141592653589793],"base":"coordinate_x"},"planes":[{"graph":[[1.0]]}]}"#,
    r#"{"n":1,"index":"hormander","planes":["coordinate_xstar",{"graph":[[1.0]]},"coordinate_x","coordinate_xstar"]}"#,
    r#"{"n":2,"index":"leray","lifts":[{"plane":{"graph":[[1.0,0.0],[0.0,0.0]]},"branch":1},{"plane":"coordinate_x"}]}"#,
];

fn main() {
    for text in JOBS {
        let report = match parse_job(text) {
            Ok(spec) => run_job(&spec, &Overrides::default()),
            Err(e) => {
                eprintln!("{e}");
                continue;
            }
        };
        println!("{}", to_json(&report));
    }
}
