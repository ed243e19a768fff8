use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{json, Value};
use weilspace::checks::{field_level, run_checks, tower_over_q, CheckContext, Corpus};
use weilspace::exact_algebra::real::{decimal_digits, working_bits};
use weilspace::exact_algebra::{format_rational, Real};
use weilspace::galois_action::{check_invariance, orbit, permutation};
use weilspace::height_space::{approximate, embed_fa, integral, lp_norm, FunctionTable, LpExponent};
use weilspace::number_fields::{field_from_json, NumberField};
use weilspace::place_tower::{partition as measured_partition, refinement_map, tower_from_json, Tower};
use weilspace::places::{height as place_sum_height, height_mahler, log_abs, places_above, RationalPlace};
use weilspace::{Error, Result};

/// A JSON report and whether every verdict in it passed.
pub type Report = Result<(Value, bool)>;

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_field(path: &Path) -> Result<NumberField> {
    field_from_json(&read(path)?)
}

fn load_tower(path: &Path, prec: u32) -> Result<Tower> {
    Ok(tower_from_json(&read(path)?)?.with_precision(prec))
}

fn digits(prec: u32) -> usize {
    decimal_digits(prec)
}

pub fn height(field: &Path, elem: &str, prec: u32) -> Report {
    let k = load_field(field)?;
    let a = k.element(elem)?;
    let h = place_sum_height(&a, prec)?;
    let m = height_mahler(&a, prec)?;
    let diff = (&h.value - &m.value).abs();
    let tol = Real::pow2(-(prec as i64) / 4, working_bits(prec));
    let agree = diff < tol;
    let d = digits(prec);
    Ok((
        json!({
            "field": k.label(),
            "element": a.to_string(),
            "value": h.value.to_decimal(d),
            "mahler": m.value.to_decimal(d),
            "defect": h.defect.as_ref().map(|x| x.to_decimal(d)),
            "difference": diff.to_decimal(d),
            "method_agreement": agree,
            "precision_bits": prec,
        }),
        agree,
    ))
}

pub fn places(field: &Path, rational: &[String], elem: Option<&str>, prec: u32) -> Report {
    let k = load_field(field)?;
    let a = elem.map(|e| k.element(e)).transpose()?;
    let d = digits(prec);
    let mut out = vec![];
    for r in rational {
        let v: RationalPlace = r.parse()?;
        for w in places_above(&k, v, prec)? {
            let mut rec = serde_json::to_value(w.record()).expect("serializable");
            if let Some(a) = &a {
                let lv = log_abs(&w, a, prec)?;
                rec["log_unnormalized"] = json!(lv.log_unnormalized.to_decimal(d));
                rec["log_normalized"] = json!(lv.log_normalized.to_decimal(d));
                if let Some(val) = lv.valuation {
                    rec["valuation"] = json!(val);
                }
                if let Some(e) = &lv.exponent {
                    rec["exponent"] = json!(format_rational(e));
                }
            }
            out.push(rec);
        }
    }
    Ok((json!({ "field": k.label(), "degree": k.degree(), "places": out, "precision_bits": prec }), true))
}

pub fn fa(tower: Option<&Path>, field: Option<&Path>, level: Option<usize>, elem: &str, prec: u32) -> Report {
    let (t, j, label) = match (tower, field) {
        (Some(p), _) => {
            let t = load_tower(p, prec)?;
            let j = level.unwrap_or(t.num_levels() - 1);
            let label = t.levels().iter().map(|k| k.label()).collect::<Vec<_>>().join(" < ");
            (t, j, label)
        }
        (None, Some(p)) => {
            let k = load_field(p)?;
            let t = tower_over_q(&k)?.with_precision(prec);
            (t, field_level(&k), k.label().to_string())
        }
        (None, None) => return Err(Error::BadShape("fa needs --tower or --field".into())),
    };
    let a = t.level(j)?.element(elem)?;
    let f = embed_fa(&t, j, &a)?;
    let d = digits(prec);
    let mut table = serde_json::to_value(f.to_table(&label)).expect("serializable");
    table["integral"] = json!(integral(&f).to_decimal(d));
    table["l1_norm"] = json!(lp_norm(&f, LpExponent::Finite(1.0))?.to_decimal(d));
    table["weights"] = json!(f.cells().map(|(_, c)| (c.place_id.clone(), format_rational(&c.weight))).collect::<Vec<_>>());
    Ok((table, true))
}

pub fn partition(tower: &Path, level: usize, place: &str, prec: u32) -> Report {
    let t = load_tower(tower, prec)?;
    let v: RationalPlace = place.parse()?;
    let p = measured_partition(&t, level, v)?;
    let mut out = serde_json::to_value(p.record()).expect("serializable");
    if level > 0 {
        let m = refinement_map(&t, level - 1, v)?;
        out["maps_to_level_below"] = serde_json::to_value(m.record().assignment).expect("serializable");
    }
    Ok((out, true))
}

pub fn galois(field: &Path, place: &str, elem: Option<&str>, prec: u32) -> Report {
    let k = load_field(field)?;
    let v: RationalPlace = place.parse()?;
    let perms = k
        .automorphisms()
        .iter()
        .map(|s| permutation(s, v, prec).map(|p| p.record()))
        .collect::<Result<Vec<_>>>()?;
    let orbits = orbit(&k, v, prec)?;
    let bits = working_bits(prec);
    let fiber = places_above(&k, v, prec)?;
    let mut tables: Vec<BTreeMap<String, Real>> = fiber
        .iter()
        .map(|w| fiber.iter().map(|u| (u.id().to_string(), if u == w { Real::one(bits) } else { Real::zero(bits) })).collect())
        .collect();
    if let Some(e) = elem {
        let a = k.element(e)?;
        let mut t = BTreeMap::new();
        for w in &fiber {
            t.insert(w.id().to_string(), log_abs(w, &a, prec)?.log_unnormalized);
        }
        tables.push(t);
    }
    let inv = check_invariance(&k, v, &tables, prec)?;
    let ok = orbits.len() == 1 && inv.passed;
    Ok((
        json!({
            "field": k.label(),
            "rational_place": v,
            "permutations": perms,
            "orbits": orbits,
            "invariance": inv,
            "precision_bits": prec,
        }),
        ok,
    ))
}

pub fn check(corpus: &Path, only: &[String], prec: u32) -> Report {
    let c = Corpus::load(corpus)?;
    let s = run_checks(&c, &CheckContext::new(prec), only)?;
    let ok = s.failed == 0;
    Ok((serde_json::to_value(s).expect("serializable"), ok))
}

pub fn approx(target: &Path, tower: Option<&Path>, basis: &[String], den: u64, prec: u32) -> Report {
    let table: FunctionTable = serde_json::from_str(&read(target)?).map_err(|e| Error::Parse(e.to_string()))?;
    let t = match tower {
        Some(p) => load_tower(p, prec)?,
        None => tower_over_q(&NumberField::rationals())?.with_precision(prec),
    };
    let f = table.build(&t)?;
    let k = t.level(table.level)?;
    let basis_elems = basis.iter().map(|e| k.element(e.trim())).collect::<Result<Vec<_>>>()?;
    let sol = approximate(&f, &basis_elems, den, prec)?;
    let mut out = serde_json::to_value(sol.record()).expect("serializable");
    out["basis"] = json!(basis);
    out["precision_bits"] = json!(prec);
    Ok((out, true))
}
