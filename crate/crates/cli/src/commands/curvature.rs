use std::io::Write;

use serde::Serialize;

use s3flow::geometry::{self, FrameAxis, RicciDiagnostics, TwoParamJet};
use s3flow::oracle;

use crate::args::{CurvatureArgs, Profile, TextFormat};
use crate::error::CliError;
use crate::output::{emit, Num, Ordered};

#[derive(Debug, Serialize)]
struct RicciJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    ric00: Option<Num>,
    ric11: Num,
    ric22: Num,
    ric33: Num,
    scalar: Num,
}

impl From<&RicciDiagnostics> for RicciJson {
    fn from(r: &RicciDiagnostics) -> Self {
        Self {
            ric00: r.ric00.map(Num),
            ric11: Num(r.ric11),
            ric22: Num(r.ric22),
            ric33: Num(r.ric33),
            scalar: Num(r.scalar),
        }
    }
}

#[derive(Debug, Serialize)]
struct CurvatureReport {
    jet: Ordered<Num>,
    ricci_restricted: RicciJson,
    /// `"i,j,k" -> c` for `ω^i_j = c ε^k`, `i < j`.
    connection: Ordered<Num>,
    #[serde(skip_serializing_if = "Option::is_none")]
    asd_residual: Option<Ordered<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ricci_ambient: Option<RicciJson>,
    contact_pairing: Ordered<Num>,
}

fn need(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

/// The jet, and whether first derivatives were actually supplied.
fn build_jet(a: &CurvatureArgs) -> Result<(TwoParamJet, bool), CliError> {
    match a.profile {
        Some(Profile::Eh) => {
            let jet = oracle::eh_jet(need(a.a, "a")?, need(a.r, "r")?)?;
            Ok((jet, true))
        }
        Some(Profile::Round) => {
            let f = need(a.f, "f")?;
            Ok((
                TwoParamJet::round(f, a.df.unwrap_or(0.0), a.ddf),
                a.df.is_some(),
            ))
        }
        None => {
            let (a1, a2) = (need(a.a1, "a1")?, need(a.a2, "a2")?);
            let has_first = a.da1.is_some() || a.da2.is_some();
            let mut jet = TwoParamJet::new(a1, a2, a.da1.unwrap_or(0.0), a.da2.unwrap_or(0.0));
            match (a.dda1, a.dda2) {
                (Some(x), Some(y)) => jet = jet.with_second(x, y),
                (None, None) => {}
                _ => return Err(CliError::usage("give both --dda1 and --dda2 or neither")),
            }
            Ok((jet, has_first))
        }
    }
}

fn report(jet: &TwoParamJet, has_first: bool) -> Result<CurvatureReport, CliError> {
    let omega = geometry::connection_form(jet)?;
    let restricted = geometry::ricci_bar(jet.a1, jet.a2)?;
    let mut fields = vec![
        ("a1".to_owned(), Num(jet.a1)),
        ("a2".to_owned(), Num(jet.a2)),
        ("da1".to_owned(), Num(jet.da1)),
        ("da2".to_owned(), Num(jet.da2)),
    ];
    if let Some(s) = jet.second {
        fields.push(("dda1".to_owned(), Num(s.dda1)));
        fields.push(("dda2".to_owned(), Num(s.dda2)));
    }
    let asd = if has_first {
        let r = geometry::asd_residual(jet)?;
        Some(Ordered(vec![
            ("rho1".to_owned(), Num(r.rho1)),
            ("rho2".to_owned(), Num(r.rho2)),
        ]))
    } else {
        None
    };
    let ambient = match jet.second {
        Some(_) => Some(RicciJson::from(&geometry::ricci_ambient(jet)?)),
        None => None,
    };
    let mut pairing = Vec::new();
    for (i, axis) in [FrameAxis::E1, FrameAxis::E2, FrameAxis::E3]
        .into_iter()
        .enumerate()
    {
        pairing.push((
            format!("e{}", i + 1),
            Num(geometry::contact_pairing(axis, jet.a1, jet.a2)?),
        ));
    }
    Ok(CurvatureReport {
        jet: Ordered(fields),
        ricci_restricted: RicciJson::from(&restricted),
        connection: Ordered(
            omega
                .entries()
                .map(|((i, j, k), c)| (format!("{i},{j},{k}"), Num(c)))
                .collect(),
        ),
        asd_residual: asd,
        ricci_ambient: ambient,
        contact_pairing: Ordered(pairing),
    })
}

fn write_text(w: &mut dyn Write, r: &CurvatureReport) -> std::io::Result<()> {
    let g = |n: &Num| format!("{:.12}", n.0);
    let line = |w: &mut dyn Write, o: &Ordered<Num>| -> std::io::Result<()> {
        let parts: Vec<String> = o.0.iter().map(|(k, v)| format!("{k} = {}", g(v))).collect();
        writeln!(w, "  {}", parts.join("  "))
    };
    writeln!(w, "jet")?;
    line(w, &r.jet)?;
    let ric = |w: &mut dyn Write, title: &str, x: &RicciJson| -> std::io::Result<()> {
        writeln!(w, "{title}")?;
        if let Some(r0) = &x.ric00 {
            write!(w, "  ric00 = {}", g(r0))?;
        }
        writeln!(
            w,
            "  ric11 = {}  ric22 = {}  ric33 = {}  scalar = {}",
            g(&x.ric11),
            g(&x.ric22),
            g(&x.ric33),
            g(&x.scalar)
        )
    };
    ric(w, "restricted Ricci (S³ slice)", &r.ricci_restricted)?;
    if let Some(a) = &r.ricci_ambient {
        ric(w, "ambient Ricci", a)?;
    }
    writeln!(w, "connection form ω^i_j = c ε^k")?;
    for (k, v) in &r.connection.0 {
        writeln!(w, "  ({k}) {}", g(v))?;
    }
    if let Some(a) = &r.asd_residual {
        writeln!(w, "anti-self-duality residual")?;
        line(w, a)?;
    }
    writeln!(w, "contact pairing ψ∧d̄ψ")?;
    line(w, &r.contact_pairing)
}

pub fn curvature(args: &CurvatureArgs) -> Result<u8, CliError> {
    let (jet, has_first) = build_jet(args)?;
    let r = report(&jet, has_first)?;
    emit(None, |w| match args.format {
        TextFormat::Text => write_text(w, &r),
        TextFormat::Json => {
            serde_json::to_writer_pretty(&mut *w, &r)?;
            writeln!(w)
        }
    })?;
    Ok(0)
}
