use std::process::ExitCode;

use modal_fixpoint::kripke::countermodel;
use modal_fixpoint::proof::{check, check_in, Certificate};
use modal_fixpoint::synth::{fixed_point_with, Strategy};
use modal_fixpoint::verify::{verify_fixpoint, CertVerdict, KripkeVerdict, VerifyMethod};
use modal_fixpoint::{atoms, is_modalized, print, simplify, DepthProfile, Formula};
use serde_json::{json, Value};

use crate::args::{
    CheckCertArgs, Command, CountermodelArgs, DepthsArgs, FixpointArgs, MethodArg, VerifyArgs,
};
use crate::io::{formula_arg, logic_arg, read_source, var_arg, write_file, CliError, Style};

impl Command {
    pub fn json(&self) -> bool {
        match self {
            Command::Fixpoint(a) => a.common.json,
            Command::Verify(a) => a.common.json,
            Command::CheckCert(a) => a.json,
            Command::Depths(a) => a.common.json,
            Command::Countermodel(a) => a.common.json,
        }
    }
}

pub fn run(cmd: Command, style: Style) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Fixpoint(a) => fixpoint(a, style),
        Command::Verify(a) => verify(a, style),
        Command::CheckCert(a) => check_cert(a, style),
        Command::Depths(a) => depths(a),
        Command::Countermodel(a) => search(a, style),
    }
}

fn show(f: &Formula) -> String {
    print(f, true)
}

fn model_json(m: &modal_fixpoint::kripke::KripkeModel) -> Value {
    serde_json::from_str(&m.to_json()).expect("model JSON is valid")
}

fn fixpoint(a: FixpointArgs, style: Style) -> Result<ExitCode, CliError> {
    let n = logic_arg(a.n)?;
    let var = var_arg(&a.var)?;
    let f = formula_arg("--formula", &a.common.formula)?;
    let strategy = if a.general { Strategy::General } else { Strategy::PreferShortcut };
    let want_cert = a.certificate_out.is_some();
    let r = fixed_point_with(&f, &var, n, strategy, want_cert).map_err(CliError::domain)?;
    let shown = if a.simplify { simplify(&r.fixed_point) } else { r.fixed_point.clone() };
    if let Some(path) = &a.trace_out {
        write_file("--trace-out", path, &r.trace.to_json())?;
    }
    if let (Some(path), Some(cert)) = (&a.certificate_out, &r.certificate) {
        write_file("--certificate-out", path, &cert.to_json())?;
    }
    if a.common.json {
        let obj = json!({
            "n": n.get(),
            "var": var,
            "input": show(&f),
            "fixed_point": show(&shown),
            "simplified": a.simplify,
            "method": r.method.name(),
            "trace_stages": r.trace.stages.len(),
            "certificate": r.certificate.as_ref().map(|c| json!({
                "lines": c.len(),
                "checked": true,
                "path": a.certificate_out.as_ref().map(|p| p.display().to_string()),
            })),
        });
        println!("{obj}");
    } else {
        println!("{}", show(&shown));
        if let Some(c) = &r.certificate {
            eprintln!("{}: {} lines, checked", style.good("certificate"), c.len());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn verify(a: VerifyArgs, style: Style) -> Result<ExitCode, CliError> {
    let n = logic_arg(a.n)?;
    let var = var_arg(&a.var)?;
    let f = formula_arg("--formula", &a.common.formula)?;
    let c = formula_arg("--candidate", &a.candidate)?;
    let method = match a.method {
        MethodArg::Cert => VerifyMethod::Cert,
        MethodArg::Kripke => VerifyMethod::Kripke,
        MethodArg::Both => VerifyMethod::Both,
    };
    if method != VerifyMethod::Cert && a.max_worlds == 0 {
        return Err(CliError::Usage("--max-worlds: must be at least 1".into()));
    }
    let rep = verify_fixpoint(&f, &c, &var, n, method, a.max_worlds).map_err(CliError::domain)?;
    if let (Some(path), Some(CertVerdict::Ok { certificate, .. })) = (&a.certificate_out, &rep.cert) {
        write_file("--certificate-out", path, &certificate.to_json())?;
    }
    if a.common.json {
        let cert = rep.cert.as_ref().map(|v| match v {
            CertVerdict::Ok { strategy, certificate } => {
                json!({ "verdict": "ok", "strategy": strategy, "lines": certificate.len() })
            }
            CertVerdict::NoStrategy => json!({ "verdict": "no-strategy" }),
        });
        let kripke = rep.kripke.as_ref().map(|v| match v {
            KripkeVerdict::NoCountermodel { max_worlds } => {
                json!({ "verdict": "no-countermodel", "max_worlds": max_worlds })
            }
            KripkeVerdict::Refuted(cm) => {
                json!({ "verdict": "refuted", "world": cm.world, "model": model_json(&cm.model) })
            }
        });
        println!("{}", json!({ "cert": cert, "kripke": kripke, "accepted": rep.accepted() }));
    } else {
        if let Some(v) = &rep.cert {
            let tag = if matches!(v, CertVerdict::Ok { .. }) { style.good("cert") } else { style.label("cert") };
            println!("{tag}: {v}");
        }
        if let Some(v) = &rep.kripke {
            let tag = if matches!(v, KripkeVerdict::Refuted(_)) { style.bad("kripke") } else { style.good("kripke") };
            println!("{tag}: {v}");
        }
    }
    Ok(if rep.accepted() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn check_cert(a: CheckCertArgs, style: Style) -> Result<ExitCode, CliError> {
    let text = if a.certificate == "-" {
        read_source("certificate", "-")?
    } else {
        read_source("certificate", &format!("@{}", a.certificate))?
    };
    let cert = Certificate::from_json(&text).map_err(CliError::domain)?;
    let verdict = match a.n {
        Some(n) => check_in(&cert, logic_arg(n)?),
        None => check(&cert),
    };
    match verdict {
        Ok(()) => {
            if a.json {
                let obj = json!({
                    "ok": true,
                    "logic_n": cert.logic.get(),
                    "lines": cert.len(),
                    "goal": show(&cert.goal),
                });
                println!("{obj}");
            } else {
                println!(
                    "{}: {} lines in wGL_{}, goal {}",
                    style.good("ok"),
                    cert.len(),
                    cert.logic.get(),
                    show(&cert.goal)
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            if a.json {
                println!("{}", json!({ "ok": false, "line": e.line, "error": e.reason.to_string() }));
                Ok(ExitCode::from(1))
            } else {
                Err(CliError::Domain(format!("certificate rejected: {e}")))
            }
        }
    }
}

fn depths(a: DepthsArgs) -> Result<ExitCode, CliError> {
    let var = var_arg(&a.var)?;
    let f = formula_arg("--formula", &a.common.formula)?;
    let modulus = a.modulus.map(logic_arg).transpose().map_err(|_| {
        CliError::Usage(format!("--mod: modulus must be at least 1, got {}", a.modulus.unwrap_or(0)))
    })?;
    let d = DepthProfile::new(&f, &var, modulus);
    if a.common.json {
        let obj = json!({
            "var": var,
            "depths": d.depths,
            "modulus": d.modulus,
            "residues": d.residues,
            "modalized": is_modalized(&f, &var),
        });
        println!("{obj}");
    } else {
        let list = |s: &std::collections::BTreeSet<usize>| s.iter().map(usize::to_string).collect::<Vec<_>>().join(", ");
        println!("depths: {}", list(&d.depths));
        if let (Some(m), Some(r)) = (d.modulus, &d.residues) {
            let classes: Vec<String> = r.iter().map(|x| format!("[{x}]_{m}")).collect();
            println!("residues mod {m}: {}", classes.join(", "));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn search(a: CountermodelArgs, style: Style) -> Result<ExitCode, CliError> {
    let n = logic_arg(a.n)?;
    let f = formula_arg("--formula", &a.common.formula)?;
    if a.max_worlds == 0 {
        return Err(CliError::Usage("--max-worlds: must be at least 1".into()));
    }
    let found = countermodel(&f, n, a.max_worlds).map_err(|e| match e {
        modal_fixpoint::kripke::KripkeError::BoundExceeded { .. } => CliError::Usage(format!("--max-worlds: {e}")),
        other => CliError::domain(other),
    })?;
    if a.common.json {
        let obj = match &found {
            Some(cm) => json!({
                "found": true,
                "max_worlds": a.max_worlds,
                "atoms": atoms(&f),
                "world": cm.world,
                "model": model_json(&cm.model),
            }),
            None => json!({ "found": false, "max_worlds": a.max_worlds, "atoms": atoms(&f) }),
        };
        println!("{obj}");
    } else {
        match &found {
            Some(cm) => {
                println!("{} at world {}", style.bad("countermodel"), cm.world);
                print!("{}", cm.model.to_json());
            }
            None => println!("no countermodel ≤ {} worlds", a.max_worlds),
        }
    }
    Ok(ExitCode::SUCCESS)
}
