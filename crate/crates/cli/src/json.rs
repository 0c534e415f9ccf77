//! JSON encodings. Rationals are strings in `num/den` form; maps keyed by places
//! use `"inf"` and decimal primes.

use std::collections::BTreeMap;

use mwk_core::arith::render_rational;
use mwk_core::idele::MwIdele;
use mwk_core::localsym::{BValue, K1Local};
use mwk_core::mwcore::{MilnorNF, ResiduePayload, WittNF};
use mwk_core::quadform::SquareClassFp;
use mwk_core::{MwNormalForm, Place, Rational, ResidueClass};
use num_traits::One;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::parse::parse_rational;

pub fn rational(x: &Rational) -> Value {
    Value::String(render_rational(x))
}

fn square_class(d: Option<SquareClassFp>) -> Value {
    match d {
        Some(SquareClassFp::Square) => json!("square"),
        Some(SquareClassFp::Nonsquare) => json!("nonsquare"),
        None => Value::Null,
    }
}

pub fn milnor(m: &MilnorNF) -> Value {
    match m {
        MilnorNF::Zero => json!({ "kind": "zero" }),
        MilnorNF::Integer(k) => json!({ "kind": "integer", "value": k }),
        MilnorNF::Unit(u) => json!({ "kind": "unit", "value": u.to_string() }),
        MilnorNF::K2 { real_bit, tame } => {
            let tame: Map<String, Value> = tame.iter().map(|(p, t)| (p.to_string(), json!(t))).collect();
            json!({ "kind": "k2", "real_bit": real_bit, "tame": tame })
        }
        MilnorNF::Sign(b) => json!({ "kind": "sign", "value": b }),
    }
}

pub fn witt(w: &WittNF) -> Value {
    let hasse = w.hasse().map(|h| {
        h.into_iter()
            .map(|(p, s)| (p.to_string(), json!(s)))
            .collect::<Map<String, Value>>()
    });
    json!({
        "signature": w.signature(),
        "rank": w.rank(),
        "rank_parity": w.class().rank_parity(),
        "signed_disc": w.signed_disc().map(|d| d.to_string()),
        "hasse": hasse,
    })
}

pub fn residue(r: &ResidueClass) -> Value {
    let mut out = json!({
        "p": r.p,
        "degree": r.degree,
        "trivial": r.is_trivial(),
    });
    let extra = match &r.payload {
        ResiduePayload::Trivial => json!({ "group": "zero" }),
        ResiduePayload::Unit(u) => json!({ "group": "units", "value": u }),
        ResiduePayload::GW(x) => json!({ "group": "GW", "rank": x.rank, "disc": square_class(x.disc) }),
        ResiduePayload::W(x) => json!({ "group": "W", "rank_parity": x.rank_parity, "disc": square_class(x.disc) }),
    };
    out.as_object_mut().unwrap().extend(extra.as_object().unwrap().clone());
    out
}

pub fn normal_form(nf: &MwNormalForm) -> Value {
    let residues: Map<String, Value> = nf
        .residues
        .iter()
        .map(|(p, r)| (p.to_string(), residue(r)))
        .collect();
    json!({
        "degree": nf.degree,
        "is_zero": nf.is_zero(),
        "milnor": milnor(&nf.milnor),
        "witt": witt(&nf.witt),
        "s_inf": nf.s_inf,
        "residues": residues,
    })
}

/// Integers at the real place and 2, the residue in `F_p^x` at odd p.
pub fn bvalue(b: &BValue) -> Value {
    match *b {
        BValue::Integer(k) => json!(k),
        BValue::Sign(s) => json!(s),
        BValue::Unit { value, .. } => json!(value),
    }
}

pub fn place_map<T>(m: &BTreeMap<Place, T>, f: impl Fn(&T) -> Value) -> Value {
    Value::Object(m.iter().map(|(v, x)| (v.to_string(), f(x))).collect())
}

fn local(x: &K1Local) -> Value {
    json!({ "u": rational(x.u()), "twist": x.twist() })
}

pub fn idele(x: &MwIdele) -> Value {
    let finite: Map<String, Value> = x.finite().iter().map(|(p, c)| (p.to_string(), local(c))).collect();
    let mut out = json!({ "real": local(x.real()), "finite": finite });
    if !x.unlisted().is_one() {
        out["unlisted"] = rational(x.unlisted());
    }
    out
}

fn read_rational(v: &Value, what: &str) -> CliResult<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => n
            .as_i64()
            .map(|k| Rational::from_integer(k.into()))
            .ok_or_else(|| CliError::Input(format!("{what}: {n} is not an integer"))),
        other => Err(CliError::Input(format!("{what}: expected a rational, found {other}"))),
    }
}

fn read_local(v: &Value, place: Place) -> CliResult<K1Local> {
    let u = v
        .get("u")
        .ok_or_else(|| CliError::Input(format!("component at {place} has no \"u\"")))?;
    let twist = match v.get("twist") {
        None => 0,
        Some(t) => t
            .as_i64()
            .ok_or_else(|| CliError::Input(format!("twist at {place} is not an integer")))?,
    };
    Ok(K1Local::new(read_rational(u, &format!("u at {place}"))?, twist, place)?)
}

/// Reads `{"real": {"u", "twist"}, "finite": {"p": {"u", "twist"}}, "unlisted": "1"}`;
/// every field is optional.
pub fn read_idele(v: &Value) -> CliResult<MwIdele> {
    let obj = v
        .as_object()
        .ok_or_else(|| CliError::Input("an idele must be a JSON object".into()))?;
    if let Some(k) = obj.keys().find(|k| !["real", "finite", "unlisted"].contains(&k.as_str())) {
        return Err(CliError::Input(format!("unknown idele field \"{k}\"")));
    }
    let real = match obj.get("real") {
        Some(r) => read_local(r, Place::Real)?,
        None => K1Local::identity(Place::Real),
    };
    let mut finite = BTreeMap::new();
    if let Some(f) = obj.get("finite") {
        let f = f
            .as_object()
            .ok_or_else(|| CliError::Input("\"finite\" must be an object keyed by primes".into()))?;
        for (key, c) in f {
            let p: u64 = key
                .parse()
                .map_err(|_| CliError::Input(format!("\"{key}\" is not a prime")))?;
            if !mwk_core::arith::is_prime(p) {
                return Err(mwk_core::MwError::NotPrime(p).into());
            }
            finite.insert(p, read_local(c, Place::Finite(p))?);
        }
    }
    let unlisted = match obj.get("unlisted") {
        Some(u) => read_rational(u, "unlisted")?,
        None => Rational::from_integer(1.into()),
    };
    Ok(MwIdele::with_unlisted(real, finite, unlisted)?)
}
