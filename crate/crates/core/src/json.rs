//! Stable JSON file formats.
//!
//! One object per file. Rationals travel as `"p"` or `"p/q"` strings so
//! nothing is lost to binary floating point; the only floats in any format
//! are the eigenvalue diagnostics of the doubly-nonnegative report.
//! Emission is deterministic: fixed field order, two-space indentation, one
//! trailing newline.

use crate::dnn::{DnnReport, DnnVerdict};
use crate::equilibria::{EquilibriumReport, Witness, XECertificate};
use crate::error::{Error, Result};
use crate::game::{Game, JointDistribution, ProductProfile};
use crate::group::{close_group_capped, GroupAction, GroupElement, StrategySpace};
use crate::rational::{format_rat, parse_rat, Rat};
use serde::{Deserialize, Serialize};

fn pretty<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable value");
    out.push('\n');
    out
}

fn parse_error(what: &str, err: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{what}: {err}"))
}

// ---------------------------------------------------------------------------
// Games

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameDto {
    players: usize,
    strategies: Vec<Vec<String>>,
    utilities: Vec<Vec<String>>,
}

pub fn game_to_json(game: &Game) -> String {
    let strategies: Vec<Vec<String>> = (0..game.player_count())
        .map(|i| {
            (0..game.strategy_counts()[i])
                .map(|s| game.strategy_label(i, s))
                .collect()
        })
        .collect();
    let utilities = (0..game.player_count())
        .map(|i| game.utilities(i).iter().map(format_rat).collect())
        .collect();
    pretty(&GameDto {
        players: game.player_count(),
        strategies,
        utilities,
    })
}

pub fn game_from_json(text: &str) -> Result<Game> {
    let dto: GameDto = serde_json::from_str(text).map_err(|e| parse_error("game JSON", e))?;
    if dto.strategies.len() != dto.players {
        return Err(Error::Parse(format!(
            "strategy lists for {} players, header says {}",
            dto.strategies.len(),
            dto.players
        )));
    }
    let counts: Vec<usize> = dto.strategies.iter().map(|labels| labels.len()).collect();
    let mut utilities = Vec::with_capacity(dto.utilities.len());
    for (i, tensor) in dto.utilities.iter().enumerate() {
        let mut parsed = Vec::with_capacity(tensor.len());
        for (k, s) in tensor.iter().enumerate() {
            parsed
                .push(parse_rat(s).map_err(|e| Error::Parse(format!("utilities[{i}][{k}]: {e}")))?);
        }
        utilities.push(parsed);
    }
    Game::with_names(counts, Some(dto.strategies), utilities)
}

// ---------------------------------------------------------------------------
// Groups

/// A strategy inside a generator pair: numeric index or label.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum StrategyRef {
    Index(usize),
    Label(String),
}

type PointDto = (usize, StrategyRef);
type PairDto = (PointDto, PointDto);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupDto {
    generators: Vec<Vec<PairDto>>,
}

fn resolve_strategy(game: &Game, player: usize, s: &StrategyRef) -> Result<usize> {
    if player >= game.player_count() {
        return Err(Error::Parse(format!("player {player} out of range")));
    }
    match s {
        StrategyRef::Index(i) => {
            if *i >= game.strategy_counts()[player] {
                return Err(Error::Parse(format!(
                    "strategy index {i} out of range for player {player}"
                )));
            }
            Ok(*i)
        }
        StrategyRef::Label(label) => {
            let count = game.strategy_counts()[player];
            for s in 0..count {
                if game.strategy_label(player, s) == *label {
                    return Ok(s);
                }
            }
            Err(Error::Parse(format!(
                "player {player} has no strategy labeled {label:?}"
            )))
        }
    }
}

/// Emits the group with its full element list as generators: closing the
/// emitted list reproduces the group exactly, whatever generated it.
pub fn group_to_json(game: &Game, group: &GroupAction) -> String {
    let space = group.space();
    let generators: Vec<Vec<PairDto>> = group
        .elements()
        .iter()
        .filter(|g| !g.is_identity())
        .map(|g| {
            let mut pairs = Vec::new();
            for i in 0..game.player_count() {
                for s in 0..game.strategy_counts()[i] {
                    let (j, t) = g.apply(space, i, s);
                    if (j, t) != (i, s) {
                        pairs.push(((i, StrategyRef::Index(s)), (j, StrategyRef::Index(t))));
                    }
                }
            }
            pairs
        })
        .collect();
    pretty(&GroupDto { generators })
}

pub fn group_from_json(game: &Game, text: &str, closure_cap: usize) -> Result<GroupAction> {
    let dto: GroupDto = serde_json::from_str(text).map_err(|e| parse_error("group JSON", e))?;
    let space = StrategySpace::of_game(game);
    let mut generators = Vec::with_capacity(dto.generators.len());
    for (k, pairs) in dto.generators.iter().enumerate() {
        let mut resolved = Vec::with_capacity(pairs.len());
        for ((fp, fs), (tp, ts)) in pairs {
            let from = (*fp, resolve_strategy(game, *fp, fs)?);
            let to = (*tp, resolve_strategy(game, *tp, ts)?);
            resolved.push((from, to));
        }
        generators.push(
            GroupElement::from_pairs(&space, &resolved)
                .map_err(|e| Error::Parse(format!("generator {k}: {e}")))?,
        );
    }
    close_group_capped(game, &generators, closure_cap)
}

// ---------------------------------------------------------------------------
// Distributions and profiles

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionDto {
    probabilities: Vec<String>,
}

pub fn distribution_to_json(dist: &JointDistribution) -> String {
    pretty(&DistributionDto {
        probabilities: dist.probs().iter().map(format_rat).collect(),
    })
}

pub fn distribution_from_json(game: &Game, text: &str) -> Result<JointDistribution> {
    let dto: DistributionDto =
        serde_json::from_str(text).map_err(|e| parse_error("distribution JSON", e))?;
    let probs = parse_rat_vec(&dto.probabilities, "probabilities")?;
    JointDistribution::new(game, probs)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDto {
    strategies: Vec<Vec<String>>,
}

pub fn profile_to_json(profile: &ProductProfile) -> String {
    pretty(&ProfileDto {
        strategies: profile
            .strategies()
            .iter()
            .map(|v| v.iter().map(format_rat).collect())
            .collect(),
    })
}

pub fn profile_from_json(game: &Game, text: &str) -> Result<ProductProfile> {
    let dto: ProfileDto = serde_json::from_str(text).map_err(|e| parse_error("profile JSON", e))?;
    let mut strategies = Vec::with_capacity(dto.strategies.len());
    for (i, v) in dto.strategies.iter().enumerate() {
        strategies.push(parse_rat_vec(v, &format!("strategies[{i}]"))?);
    }
    ProductProfile::new(game, strategies)
}

fn parse_rat_vec(values: &[String], what: &str) -> Result<Vec<Rat>> {
    values
        .iter()
        .enumerate()
        .map(|(k, s)| parse_rat(s).map_err(|e| Error::Parse(format!("{what}[{k}]: {e}"))))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsDto {
    weights: Vec<String>,
}

/// A rational profile-weighting (an LP objective, not a distribution).
pub fn weights_from_json(game: &Game, text: &str) -> Result<Vec<Rat>> {
    let dto: WeightsDto = serde_json::from_str(text).map_err(|e| parse_error("weights JSON", e))?;
    let weights = parse_rat_vec(&dto.weights, "weights")?;
    if weights.len() != game.profile_count() {
        return Err(Error::Dimension(format!(
            "weighting has {} entries, profile space has {}",
            weights.len(),
            game.profile_count()
        )));
    }
    Ok(weights)
}

pub fn weights_to_json(weights: &[Rat]) -> String {
    pretty(&WeightsDto {
        weights: weights.iter().map(format_rat).collect(),
    })
}

// ---------------------------------------------------------------------------
// Certificates

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateDto {
    weights: Vec<String>,
    columns: Vec<Vec<Vec<String>>>,
    epsilon: String,
}

pub fn certificate_to_json(cert: &XECertificate) -> String {
    pretty(&CertificateDto {
        weights: cert.weights.iter().map(format_rat).collect(),
        columns: cert
            .columns
            .iter()
            .map(|col| {
                col.strategies()
                    .iter()
                    .map(|v| v.iter().map(format_rat).collect())
                    .collect()
            })
            .collect(),
        epsilon: format_rat(&cert.epsilon),
    })
}

pub fn certificate_from_json(game: &Game, text: &str) -> Result<XECertificate> {
    let dto: CertificateDto =
        serde_json::from_str(text).map_err(|e| parse_error("certificate JSON", e))?;
    let weights = parse_rat_vec(&dto.weights, "weights")?;
    let mut columns = Vec::with_capacity(dto.columns.len());
    for (k, col) in dto.columns.iter().enumerate() {
        let mut strategies = Vec::with_capacity(col.len());
        for (i, v) in col.iter().enumerate() {
            strategies.push(parse_rat_vec(v, &format!("columns[{k}][{i}]"))?);
        }
        columns.push(ProductProfile::new(game, strategies)?);
    }
    let epsilon = parse_rat(&dto.epsilon).map_err(|e| Error::Parse(format!("epsilon: {e}")))?;
    Ok(XECertificate {
        columns,
        weights,
        epsilon,
    })
}

// ---------------------------------------------------------------------------
// Symmetric matrices (doubly-nonnegative checks)

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDto {
    matrix: Vec<Vec<String>>,
}

pub fn matrix_to_json(matrix: &[Vec<Rat>]) -> String {
    pretty(&MatrixDto {
        matrix: matrix
            .iter()
            .map(|row| row.iter().map(format_rat).collect())
            .collect(),
    })
}

pub fn matrix_from_json(text: &str) -> Result<Vec<Vec<Rat>>> {
    let dto: MatrixDto = serde_json::from_str(text).map_err(|e| parse_error("matrix JSON", e))?;
    dto.matrix
        .iter()
        .enumerate()
        .map(|(i, row)| parse_rat_vec(row, &format!("matrix[{i}]")))
        .collect()
}

/// A joint distribution on a two-player game with equal strategy counts,
/// viewed as a square matrix `[s1][s2]`.
pub fn distribution_as_matrix(game: &Game, dist: &JointDistribution) -> Result<Vec<Vec<Rat>>> {
    if game.player_count() != 2 {
        return Err(Error::InvalidArgument("need a two-player game".to_string()));
    }
    let rows = game.strategy_counts()[0];
    let cols = game.strategy_counts()[1];
    if rows != cols {
        return Err(Error::InvalidArgument("strategy counts differ".to_string()));
    }
    if !dist.matches(game) {
        return Err(Error::Dimension(
            "distribution shape differs from game".to_string(),
        ));
    }
    let mut out = vec![vec![Rat::from_integer(0.into()); cols]; rows];
    for r in 0..rows {
        for c in 0..cols {
            out[r][c] = dist.probs()[game.profile_index(&[r, c])].clone();
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Serialize)]
struct WitnessDto {
    player: usize,
    from: Option<String>,
    to: String,
}

#[derive(Serialize)]
struct ReportDto {
    verdict: bool,
    worst_violation: String,
    witness: Option<WitnessDto>,
}

fn witness_dto(game: &Game, witness: &Witness) -> WitnessDto {
    match witness {
        Witness::PureDeviation { player, to } => WitnessDto {
            player: player + 1,
            from: None,
            to: game.strategy_label(*player, *to),
        },
        Witness::Deviation { player, from, to } => WitnessDto {
            player: player + 1,
            from: Some(game.strategy_label(*player, *from)),
            to: game.strategy_label(*player, *to),
        },
    }
}

pub fn report_to_json(game: &Game, report: &EquilibriumReport) -> String {
    pretty(&ReportDto {
        verdict: report.verdict,
        worst_violation: format_rat(&report.worst_violation),
        witness: report.witness.as_ref().map(|w| witness_dto(game, w)),
    })
}

pub fn report_to_text(game: &Game, report: &EquilibriumReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("verdict: {}\n", report.verdict));
    out.push_str(&format!(
        "worst violation: {}\n",
        format_rat(&report.worst_violation)
    ));
    if let Some(w) = &report.witness {
        let dto = witness_dto(game, w);
        match dto.from {
            Some(from) => out.push_str(&format!(
                "witness: player {}: {} -> {}, violation {}\n",
                dto.player,
                from,
                dto.to,
                format_rat(&report.worst_violation)
            )),
            None => out.push_str(&format!(
                "witness: player {}: deviate to {}, violation {}\n",
                dto.player,
                dto.to,
                format_rat(&report.worst_violation)
            )),
        }
    }
    out
}

#[derive(Serialize)]
struct DnnReportDto {
    verdict: &'static str,
    dimension: usize,
    min_eigenvalue: f64,
    negative_entry: Option<(usize, usize)>,
    relaxation_only: bool,
}

pub fn dnn_report_to_json(report: &DnnReport) -> String {
    pretty(&DnnReportDto {
        verdict: dnn_verdict_str(report.verdict),
        dimension: report.dimension,
        min_eigenvalue: report.min_eigenvalue,
        negative_entry: report.negative_entry,
        relaxation_only: report.relaxation_only,
    })
}

pub fn dnn_verdict_str(verdict: DnnVerdict) -> &'static str {
    match verdict {
        DnnVerdict::Member => "member",
        DnnVerdict::NonMember => "nonmember",
        DnnVerdict::Inconclusive => "inconclusive",
    }
}

pub fn dnn_report_to_text(report: &DnnReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("verdict: {}\n", dnn_verdict_str(report.verdict)));
    out.push_str(&format!("dimension: {}\n", report.dimension));
    out.push_str(&format!("min eigenvalue: {:e}\n", report.min_eigenvalue));
    if let Some((i, j)) = report.negative_entry {
        out.push_str(&format!("negative entry at: ({i},{j})\n"));
    }
    if report.relaxation_only {
        out.push_str("note: dimension exceeds 4; a pass certifies the relaxation only\n");
    }
    out
}

/// Row and column labels for the deviation game of `game`, used when it is
/// emitted in the game schema: rows are profiles, columns deviations.
pub fn deviation_game_labels(game: &Game) -> (Vec<String>, Vec<String>) {
    let rows = game
        .profiles()
        .map(|s| {
            let parts: Vec<String> = s
                .iter()
                .enumerate()
                .map(|(i, &x)| game.strategy_label(i, x))
                .collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let space = crate::deviation::DeviationSpace::of_game(game);
    let cols = space
        .iter()
        .map(|d| {
            format!(
                "p{}:{}->{}",
                d.player + 1,
                game.strategy_label(d.player, d.from),
                game.strategy_label(d.player, d.to)
            )
        })
        .collect();
    (rows, cols)
}
