//! Temporary calibration scratch (removed before release).

use hellest::simlab::{run_replications, Scenario};
use hellest::*;

fn count_study(name: &str, n: usize, reps: usize) {
    let mut s = Scenario::by_name(name).unwrap();
    s.n_list = vec![n];
    s.replications = reps;
    s.base_seed = 1000;
    s.baselines.clear();
    let recs = run_replications(&s, n).unwrap();
    let counts: Vec<f64> = recs.iter().filter_map(|r| r.ours_tests.map(|t| t as f64)).collect();
    let risks: Vec<f64> = recs.iter().filter_map(|r| r.ours_h2).collect();
    let mean = counts.iter().sum::<f64>() / counts.len() as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (counts.len() as f64 - 1.0);
    let risk = risks.iter().sum::<f64>() / risks.len() as f64;
    println!(
        "{name:<14} n={n:<4} reps={reps:<5} count mean {mean:9.1} (std {:6.2})  risk {risk:.5}",
        var.sqrt()
    );
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("1d");
    match which {
        "1d" => {
            count_study("table4-ex1", 100, 50);
            count_study("table4-ex2", 100, 50);
            count_study("table4-ex3", 100, 50);
            count_study("table4-ex4", 100, 50);
            count_study("table4-ex5", 100, 50);
            count_study("table4-ex6", 100, 20);
            count_study("table4-ex7", 100, 50);
        }
        "ex8" => count_study("table4-ex8", 100, 8),
        "2d" => {
            count_study("table6-ex1", 100, 30);
            count_study("table6-ex5", 100, 30);
            count_study("table6-ex6", 100, 30);
        }
        "risk" => {
            count_study("table4-ex2", 25, 400);
            count_study("table4-ex2", 50, 400);
            count_study("table4-ex2", 100, 400);
            count_study("table4-ex1", 50, 400);
        }
        "contam" => {
            let rep = simlab::run_uniform_contamination(&[10, 100], 400, 5).unwrap();
            print!("{}", rep.summary_table());
        }
        "agree" => {
            let mut s = Scenario::by_name("table4-ex2").unwrap();
            s.n_list = vec![100];
            s.replications = 1000;
            s.base_seed = 42;
            if let simlab::SearchConfig::OneD(c) = &mut s.config {
                c.eta = 2e-6;
            }
            let rows = simlab::run_agreement_study(&s).unwrap();
            for r in &rows {
                println!("1d n={} q99={:.3e} q999={:.3e} q100={:.3e}", r.n, r.q99, r.q999, r.q100);
            }
            let mut s = Scenario::by_name("table6-ex1").unwrap();
            s.n_list = vec![100];
            s.replications = 300;
            s.base_seed = 42;
            let rows = simlab::run_agreement_study(&s).unwrap();
            for r in &rows {
                println!("2d n={} q99={:.3e} q999={:.3e} q100={:.3e}", r.n, r.q99, r.q999, r.q100);
            }
        }
        "ex8full" => {
            let mut s = Scenario::by_name("table4-ex8").unwrap();
            s.n_list = vec![100];
            s.replications = 200;
            s.base_seed = 77;
            s.baselines = vec![
                hellest::baselines::BaselineKind::Median,
                hellest::baselines::BaselineKind::Mean,
            ];
            let rep = simlab::run_risk_study(&s).unwrap();
            print!("{}", rep.summary_table());
        }
        "ex1b" => {
            let mut s = Scenario::by_name("table6-ex1").unwrap();
            s.n_list = vec![100];
            s.replications = 1000;
            s.base_seed = 9;
            s.baselines.clear();
            let recs = run_replications(&s, 100).unwrap();
            let risks: Vec<f64> = recs.iter().filter_map(|r| r.ours_h2).collect();
            let counts: Vec<f64> = recs.iter().filter_map(|r| r.ours_tests.map(|t| t as f64)).collect();
            let risk = risks.iter().sum::<f64>() / risks.len() as f64;
            let cm = counts.iter().sum::<f64>() / counts.len() as f64;
            println!("gauss-2d n=100 N=1000: risk {risk:.5} count {cm:.1}");
        }
        other => eprintln!("unknown mode {other}"),
    }
}
