use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use chen_obstruction::cinfty::{
    canonical_formal_connection, check_cinfty, chen_delta_from_cinfty, cinfty_from_delta, mc_check,
    twisted_complex_homology, CInftyCheck, McReport, TwistedHomologyReport,
};
use chen_obstruction::derivation::{
    bch, check_chen_differential, exp_derivation, ChenCheck, ChenDifferential, DerivationComplex, FilteredAutomorphism,
    HomologyReport, WeightWindow,
};
use chen_obstruction::io::{
    AbelianObstructionDesc, AutomorphismDesc, BchDesc, CInftyDesc, CanonicalMcDesc, CohomologyDesc,
    DerivationDesc, ExplicitMcDesc, FilteredObstructionDesc,
};
use chen_obstruction::lie::{lie_component_basis, Generator, GeneratorSet, WeightTruncation};
use chen_obstruction::models::{
    johnson_tau1, mapping_torus_obstruction, random_monodromy, sphere_integral_check, sphere_report, surface_h01,
    IntegralReport, LemmaCheck, MappingTorusReport, MoritaIso, SphereReport, SurfaceModel,
};
use chen_obstruction::random::{random_transvection, rng};
use chen_obstruction::scalar::format_scalar;
use chen_obstruction::simplicial::{
    class_reduce, cup_characteristic, local_cohomology, stepwise_obstruction, CharacteristicReport, ClassReport,
    Cochain, FilteredGroupLocalSystem, GroupCochain,
};
use chen_obstruction::Error;

use crate::{parse, read_input, Cli, CliError, Command, Outcome};

type Res = Result<Outcome, CliError>;

const DEFAULT_TRUNC: usize = 4;

fn trunc(cli: &Cli) -> Result<WeightTruncation, CliError> {
    Ok(WeightTruncation::new(cli.trunc.unwrap_or(DEFAULT_TRUNC))?)
}

pub fn run(cli: &Cli) -> Res {
    match &cli.command {
        Command::LieDim { gens, weight, degree } => lie_dim(cli, gens, *weight, *degree),
        Command::Homology { input, degree, weight } => homology(cli, input.as_ref(), *degree, *weight),
        Command::Bch { input } => bch_cmd(cli, input.as_ref()),
        Command::CinftyCheck { input } => cinfty_check(input.as_ref()),
        Command::DeltaFromCinfty { input } => delta_from_cinfty(cli, input.as_ref()),
        Command::McCheck { input } => mc(cli, input.as_ref()),
        Command::TwistedHomology { input, degree } => twisted(cli, input.as_ref(), *degree),
        Command::Cohomology { input } => cohomology(input.as_ref()),
        Command::Obstruction { input } => obstruction(cli, input.as_ref()),
        Command::Sphere { tolerance } => sphere(cli, *tolerance),
        Command::Surface { genus, checks } => surface(cli, *genus, *checks),
        Command::Tau1 { input, genus, count } => tau1(cli, input.as_ref(), *genus, *count),
        Command::MappingTorus { input, genus, count } => mapping_torus(cli, input.as_ref(), *genus, *count),
    }
}

/// `2x0,1x1` -> two degree-0 and one degree-1 generator, named `x1, x2, x3`.
fn parse_gens(spec: &str) -> Result<Vec<Generator>, CliError> {
    let bad = |m: String| CliError::Input { path: "--gens".into(), message: m };
    let mut out = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (count, degree) = part.split_once('x').ok_or_else(|| bad(format!("expected COUNTxDEGREE, got `{part}`")))?;
        let count: usize = count.parse().map_err(|_| bad(format!("bad count in `{part}`")))?;
        let degree: i64 = degree.parse().map_err(|_| bad(format!("bad degree in `{part}`")))?;
        for _ in 0..count {
            out.push(Generator { name: format!("x{}", out.len() + 1), degree });
        }
    }
    if out.is_empty() {
        return Err(bad("no generators".into()));
    }
    Ok(out)
}

#[derive(Serialize)]
struct LieDimReport {
    generators: Vec<Generator>,
    weight: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<i64>,
    dim: usize,
}

fn lie_dim(cli: &Cli, spec: &str, weight: usize, degree: Option<i64>) -> Res {
    let generators = parse_gens(spec)?;
    let gens = GeneratorSet::new(generators.clone())?;
    let n = cli.trunc.unwrap_or(weight).max(weight).max(2);
    let basis = lie_component_basis(&gens, weight, degree, WeightTruncation::new(n)?)?;
    Ok(Outcome::new(&LieDimReport { generators, weight, degree, dim: basis.dim() }, true))
}

#[derive(Serialize)]
struct BlockOut {
    weight: usize,
    dim: usize,
    chain_dim: usize,
    cycles: usize,
    boundaries: usize,
    representatives: Vec<DerivationDesc>,
}

#[derive(Serialize)]
struct HomologyOut {
    degree: i64,
    trunc: usize,
    graded: bool,
    stable_max_weight: Option<usize>,
    total_dim: usize,
    blocks: Vec<BlockOut>,
}

impl From<&HomologyReport> for HomologyOut {
    fn from(r: &HomologyReport) -> Self {
        HomologyOut {
            degree: r.n,
            trunc: r.trunc,
            graded: r.graded,
            stable_max_weight: r.stable_max_weight,
            total_dim: r.total_dim(),
            blocks: r
                .blocks
                .iter()
                .map(|b| BlockOut {
                    weight: b.weight,
                    dim: b.dim,
                    chain_dim: b.chain_dim,
                    cycles: b.cycles,
                    boundaries: b.boundaries,
                    representatives: b.representatives.iter().map(|d| DerivationDesc::from_derivation(d, false)).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ChenFailed {
    chen_check: ChenCheck,
}

/// Builds δ from a descriptor, or returns the failed check as the outcome.
fn chen(desc: &DerivationDesc, t: WeightTruncation) -> Result<Result<ChenDifferential, Outcome>, CliError> {
    let d = desc.build(t)?;
    let check = check_chen_differential(&d);
    if !check.passed {
        return Ok(Err(Outcome::new(&ChenFailed { chen_check: check }, false)));
    }
    Ok(Ok(ChenDifferential::new(d)?))
}

fn homology(cli: &Cli, input: Option<&PathBuf>, n: i64, weight: Option<usize>) -> Res {
    let desc: DerivationDesc = parse(&read_input(input)?)?;
    let delta = match chen(&desc, trunc(cli)?)? {
        Ok(d) => d,
        Err(out) => return Ok(out),
    };
    let window = weight.map_or(WeightWindow::Stable, WeightWindow::Single);
    let r = DerivationComplex::new(delta).homology(n, window)?;
    Ok(Outcome::new(&HomologyOut::from(&r), true))
}

#[derive(Serialize)]
struct BchOut {
    bch: DerivationDesc,
    /// `exp(D1) exp(D2) = exp(bch(D1, D2))`.
    exp_identity: bool,
}

fn bch_cmd(cli: &Cli, input: Option<&PathBuf>) -> Res {
    let desc: BchDesc = parse(&read_input(input)?)?;
    let t = trunc(cli)?;
    let gens = GeneratorSet::new(desc.generators.clone()).map_err(|e| CliError::Input {
        path: "generators".into(),
        message: e.to_string(),
    })?;
    let d1 = desc.d1.build_over(&gens, t, "d1")?;
    let d2 = desc.d2.build_over(&gens, t, "d2")?;
    let z = bch(&d1, &d2)?;
    let holds = exp_derivation(&d1)?.compose(&exp_derivation(&d2)?)? == exp_derivation(&z)?;
    Ok(Outcome::new(&BchOut { bch: DerivationDesc::from_derivation(&z, false), exp_identity: holds }, holds))
}

#[derive(Serialize)]
struct CInftyOut {
    minimal: bool,
    max_arity: usize,
    check: CInftyCheck,
}

fn cinfty_check(input: Option<&PathBuf>) -> Res {
    let m = parse::<CInftyDesc>(&read_input(input)?)?.build()?;
    let check = check_cinfty(&m);
    let passed = check.passed && m.is_minimal();
    Ok(Outcome::new(&CInftyOut { minimal: m.is_minimal(), max_arity: m.max_arity(), check }, passed))
}

#[derive(Serialize)]
struct DeltaOut {
    delta: DerivationDesc,
    chen_check: ChenCheck,
    /// Converting back gives the input structure.
    roundtrip: bool,
}

fn delta_from_cinfty(cli: &Cli, input: Option<&PathBuf>) -> Res {
    let m = parse::<CInftyDesc>(&read_input(input)?)?.build()?;
    let check = check_cinfty(&m);
    if !check.passed {
        return Ok(Outcome::new(&CInftyOut { minimal: m.is_minimal(), max_arity: m.max_arity(), check }, false));
    }
    let delta = chen_delta_from_cinfty(&m, trunc(cli)?)?;
    let chen_check = check_chen_differential(delta.as_derivation());
    let roundtrip = cinfty_from_delta(&delta)? == m;
    let passed = chen_check.passed && roundtrip;
    let out = DeltaOut { delta: DerivationDesc::from_derivation(delta.as_derivation(), true), chen_check, roundtrip };
    Ok(Outcome::new(&out, passed))
}

#[derive(Deserialize)]
struct KindOnly {
    kind: Option<String>,
}

fn kind_of(text: &str) -> Result<String, CliError> {
    let k: KindOnly = parse_lenient(text)?;
    k.kind.ok_or_else(|| CliError::Input { path: "kind".into(), message: "missing field `kind`".into() })
}

fn parse_lenient<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input { path: ".".into(), message: e.to_string() })
}

#[derive(Serialize)]
struct McOut {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    negated: Option<String>,
    #[serde(flatten)]
    report: McReport,
}

fn mc(cli: &Cli, input: Option<&PathBuf>) -> Res {
    let text = read_input(input)?;
    let t = trunc(cli)?;
    let (kind, negated, report) = match kind_of(&text)?.as_str() {
        "canonical" => {
            let desc: CanonicalMcDesc = parse(&text)?;
            let m = desc.cinfty.build()?;
            let canon = canonical_formal_connection(&m, t)?;
            let conn = match &desc.negate {
                None => canon.connection,
                Some(name) => {
                    let i = m.index_of(name).map_err(|e| CliError::Input { path: "negate".into(), message: e.to_string() })?;
                    canon.connection.with_negated(i)
                }
            };
            ("canonical", desc.negate.clone(), mc_check(&canon.dga, &conn)?)
        }
        "explicit" => {
            let desc: ExplicitMcDesc = parse(&text)?;
            let (a, conn) = desc.connection.build(t)?;
            ("explicit", None, mc_check(&a, &conn)?)
        }
        other => {
            return Err(CliError::Input { path: "kind".into(), message: format!("expected `canonical` or `explicit`, got `{other}`") })
        }
    };
    let passed = report.passed;
    Ok(Outcome::new(&McOut { kind: kind.into(), negated, report }, passed))
}

#[derive(Serialize)]
struct TwistedOut {
    twisted: TwistedHomologyReport,
    derivation_dims: Vec<(usize, usize)>,
    /// Weights stable on both sides.
    compared_weights: Vec<usize>,
    agree: bool,
}

fn twisted(cli: &Cli, input: Option<&PathBuf>, n: i64) -> Res {
    let m = parse::<CInftyDesc>(&read_input(input)?)?.build()?;
    let canon = canonical_formal_connection(&m, trunc(cli)?)?;
    let tw = twisted_complex_homology(&canon.dga, &canon.connection, n, WeightWindow::Stable)?;
    let der = DerivationComplex::new(canon.connection.delta().clone()).homology(n, WeightWindow::Stable)?;
    let derivation_dims: Vec<(usize, usize)> = der.blocks.iter().map(|b| (b.weight, b.dim)).collect();
    let mut compared_weights = Vec::new();
    let mut agree = true;
    for b in &tw.blocks {
        if let Some(&(_, d)) = derivation_dims.iter().find(|(w, _)| *w == b.weight) {
            compared_weights.push(b.weight);
            agree &= d == b.dim;
        }
    }
    Ok(Outcome::new(&TwistedOut { twisted: tw, derivation_dims, compared_weights, agree }, agree))
}

#[derive(Serialize)]
struct CohomologyOut {
    degree: usize,
    dim: usize,
    cochain_dim: usize,
    cocycles: usize,
    coboundaries: usize,
    representatives: Vec<Cochain>,
}

fn cohomology(input: Option<&PathBuf>) -> Res {
    let desc: CohomologyDesc = parse(&read_input(input)?)?;
    let k = desc.simplicial_set.build()?;
    let m = desc.local_system.build(&k)?;
    let h = local_cohomology(&k, &m, desc.degree)?;
    let out = CohomologyOut {
        degree: h.degree,
        dim: h.dim,
        cochain_dim: h.cochain_dim,
        cocycles: h.cocycles,
        coboundaries: h.coboundaries,
        representatives: h.representatives,
    };
    Ok(Outcome::new(&out, true))
}

#[derive(Serialize)]
struct AbelianOut {
    kind: &'static str,
    class: ClassReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    characteristic: Option<CharacteristicReport>,
}

#[derive(Serialize)]
struct FilteredOut {
    kind: &'static str,
    level: Option<usize>,
    coords: Vec<String>,
    checked_through: usize,
    gauge: Vec<AutomorphismDesc>,
    reduced: Vec<AutomorphismDesc>,
}

fn obstruction(cli: &Cli, input: Option<&PathBuf>) -> Res {
    let text = read_input(input)?;
    match kind_of(&text)?.as_str() {
        "abelian" => {
            let desc: AbelianObstructionDesc = parse(&text)?;
            let k = desc.simplicial_set.build()?;
            let m = desc.local_system.build(&k)?;
            let class = class_reduce(&k, &m, &desc.cochain)?;
            let characteristic = match (&desc.form, class.is_cocycle) {
                (Some(psi), true) => Some(cup_characteristic(&k, &m, psi, &desc.cochain)?),
                _ => None,
            };
            let passed = class.is_cocycle;
            Ok(Outcome::new(&AbelianOut { kind: "abelian", class, characteristic }, passed))
        }
        "filtered" => {
            let desc: FilteredObstructionDesc = parse(&text)?;
            let t = trunc(cli)?;
            let k = desc.simplicial_set.build()?;
            let gens = GeneratorSet::new(desc.generators.clone())
                .map_err(|e| CliError::Input { path: "generators".into(), message: e.to_string() })?;
            let delta = ChenDifferential::new(desc.delta.build_over(&gens, t, "delta")?)?;
            let complex = Arc::new(DerivationComplex::new(delta));
            let g = if desc.edges.is_empty() {
                FilteredGroupLocalSystem::constant(&k, complex)
            } else {
                let edges = desc
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(i, e)| e.build_over(&gens, t, &format!("edges[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                FilteredGroupLocalSystem::new(&k, complex, edges)?
            };
            let values = desc
                .cochain
                .iter()
                .enumerate()
                .map(|(i, e)| e.build_over(&gens, t, &format!("cochain[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let s = stepwise_obstruction(&k, &g, &GroupCochain { degree: 1, values })?;
            let descs = |c: &GroupCochain| c.values.iter().map(AutomorphismDesc::from_automorphism).collect();
            let out = FilteredOut {
                kind: "filtered",
                level: s.level,
                coords: s.coords.iter().map(format_scalar).collect(),
                checked_through: s.checked_through,
                gauge: descs(&s.gauge),
                reduced: descs(&s.reduced),
            };
            Ok(Outcome::new(&out, true))
        }
        other => Err(CliError::Input { path: "kind".into(), message: format!("expected `abelian` or `filtered`, got `{other}`") }),
    }
}

#[derive(Serialize)]
struct SphereOut {
    algebra: SphereReport,
    integral: IntegralReport,
}

fn sphere(cli: &Cli, tolerance: f64) -> Res {
    let algebra = sphere_report(trunc(cli)?)?;
    let integral = sphere_integral_check(tolerance)?;
    let passed = integral.passed && algebra.obstruction.nontrivial;
    Ok(Outcome::new(&SphereOut { algebra, integral }, passed))
}

fn wedge_names(model: &SurfaceModel, morita: &MoritaIso) -> Vec<String> {
    let g = model.gens();
    morita.wedges.iter().map(|w| w.iter().map(|&i| g.name(i)).collect::<Vec<_>>().join("^")).collect()
}

#[derive(Serialize)]
struct SurfaceOut {
    genus: usize,
    trunc: usize,
    expected: usize,
    homology_dim: usize,
    quotient_dim: usize,
    lemma: LemmaCheck,
    wedges: Vec<String>,
    /// Column `j` is the homology class of the `j`-th wedge.
    from_wedge: Vec<Vec<String>>,
    equivariance_checks: usize,
    equivariant: bool,
}

fn surface(cli: &Cli, genus: usize, checks: usize) -> Res {
    let model = SurfaceModel::new(genus, trunc(cli)?)?;
    let h = surface_h01(&model)?;
    let mut r = rng(cli.seed);
    let mut equivariant = true;
    for _ in 0..checks {
        let t = random_transvection(&mut r, genus, 0);
        equivariant &= h.morita.is_equivariant(&model, &t)?;
    }
    let out = SurfaceOut {
        genus,
        trunc: h.trunc,
        expected: h.expected,
        homology_dim: h.homology_dim,
        quotient_dim: h.quotient_dim,
        lemma: h.lemma.clone(),
        wedges: wedge_names(&model, &h.morita),
        from_wedge: h.morita.from_wedge.to_rows().iter().map(|row| row.iter().map(format_scalar).collect()).collect(),
        equivariance_checks: checks,
        equivariant,
    };
    let passed = h.homology_dim == h.expected && h.quotient_dim == h.expected && h.lemma.holds && equivariant;
    Ok(Outcome::new(&out, passed))
}

/// Automorphisms from the input, or `count` seeded random monodromies.
fn monodromies(
    cli: &Cli,
    input: Option<&PathBuf>,
    model: &SurfaceModel,
    count: usize,
) -> Result<Vec<FilteredAutomorphism>, CliError> {
    let phis = match input {
        Some(_) => {
            let desc: AutomorphismDesc = parse(&read_input(input)?)?;
            vec![desc.build_over(model.gens(), model.trunc(), "")?]
        }
        None => {
            let mut r = rng(cli.seed);
            (0..count).map(|_| random_monodromy(&mut r, model)).collect::<Result<_, _>>()?
        }
    };
    for phi in &phis {
        if !phi.commutes_with(model.delta())? {
            return Err(CliError::Math(Error::NotAutomorphismOfDifferential));
        }
    }
    Ok(phis)
}

#[derive(Serialize)]
struct Tau1Instance {
    /// Images of the generators that move, for reproducibility.
    automorphism: AutomorphismDesc,
    tau1: Vec<String>,
}

#[derive(Serialize)]
struct Tau1Out {
    genus: usize,
    trunc: usize,
    wedges: Vec<String>,
    instances: Vec<Tau1Instance>,
}

fn tau1(cli: &Cli, input: Option<&PathBuf>, genus: usize, count: usize) -> Res {
    let model = SurfaceModel::new(genus, trunc(cli)?)?;
    let morita = MoritaIso::new(&model)?;
    let instances = monodromies(cli, input, &model, count)?
        .iter()
        .map(|phi| {
            Ok(Tau1Instance {
                automorphism: AutomorphismDesc::from_automorphism(phi),
                tau1: johnson_tau1(phi, &model, &morita)?.iter().map(format_scalar).collect(),
            })
        })
        .collect::<Result<_, Error>>()?;
    let out = Tau1Out { genus, trunc: model.trunc().n(), wedges: wedge_names(&model, &morita), instances };
    Ok(Outcome::new(&out, true))
}

#[derive(Serialize)]
struct TorusOut {
    wedges: Vec<String>,
    instances: Vec<MappingTorusReport>,
}

fn mapping_torus(cli: &Cli, input: Option<&PathBuf>, genus: usize, count: usize) -> Res {
    let model = SurfaceModel::new(genus, trunc(cli)?)?;
    let morita = MoritaIso::new(&model)?;
    let instances = monodromies(cli, input, &model, count)?
        .iter()
        .map(|phi| mapping_torus_obstruction(phi, &model, &morita))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = instances.iter().all(|r| r.identity_holds);
    Ok(Outcome::new(&TorusOut { wedges: wedge_names(&model, &morita), instances }, passed))
}
