//! Direct model transformations: state elimination, arrow elimination and
//! agent announcements, with classification and detection of lies.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bitset::StateSet;
use crate::error::{ModelError, Result};
use crate::kripke::{KripkeModel, PointedModel, Transformed};
use crate::syntax::{Agent, Announcement, Formula};

/// State elimination: keep only the states where `f` holds.
pub fn restrict(m: &KripkeModel, f: &Formula) -> Result<KripkeModel> {
    Ok(m.induced(&m.extension(f)?).0)
}

/// State elimination on a pointed model. Fails if the point is removed.
pub fn restrict_pointed(pm: &PointedModel, f: &Formula) -> Result<PointedModel> {
    let (model, map) = pm.model.induced(&pm.model.extension(f)?);
    let point = map[pm.point].ok_or(ModelError::PointEliminated)?;
    Ok(PointedModel { model, point })
}

/// Keep only arrows into `target`, for the agents selected by `cut`.
fn cut_arrows(m: &KripkeModel, target: &StateSet, cut: impl Fn(usize) -> bool) -> KripkeModel {
    let n = m.len();
    let mut out = m.clone();
    for a in 0..m.agents().len() {
        if cut(a) {
            for s in 0..n {
                out.succ[a * n + s].intersect_with(target);
            }
        }
    }
    out
}

/// Arrow elimination: every agent keeps only arrows into `f`-states.
pub fn arrow_update(m: &KripkeModel, f: &Formula) -> Result<KripkeModel> {
    Ok(cut_arrows(m, &m.extension(f)?, |_| true))
}

/// Agent announcement by `speaker`: every other agent keeps only arrows
/// into states where the speaker believes `f`. The speaker's arrows stay.
pub fn agent_arrow_update(m: &KripkeModel, speaker: &Agent, f: &Formula) -> Result<KripkeModel> {
    let a = m.agent_index(speaker)?;
    let target = m.box_set(a, &m.extension(f)?);
    Ok(cut_arrows(m, &target, |b| b != a))
}

/// Preconditions of the direct flavors, as formulas.
pub fn precondition(ann: &Announcement) -> Result<Formula> {
    use Announcement::*;
    let not = Formula::not;
    Ok(match ann {
        PubTruth(f) => f.clone(),
        PubLie(f) => not(f.clone()),
        AgTruth(a, f) => Formula::Believes(a.clone(), Box::new(f.clone())),
        AgLie(a, f) => Formula::Believes(a.clone(), Box::new(not(f.clone()))),
        AgBluff(a, f) => not(Formula::or(
            Formula::Believes(a.clone(), Box::new(f.clone())),
            Formula::Believes(a.clone(), Box::new(not(f.clone()))),
        )),
        other => {
            return Err(ModelError::Unsupported(format!(
                "[{other}] is not a direct announcement"
            )))
        }
    })
}

pub(crate) fn transform_direct(m: &KripkeModel, ann: &Announcement) -> Result<Transformed> {
    use Announcement::*;
    let n = m.len();
    let (model, pre) = match ann {
        PubTruth(f) | PubLie(f) => {
            let e = m.extension(f)?;
            let model = cut_arrows(m, &e, |_| true);
            let pre = if matches!(ann, PubTruth(_)) { e } else { e.complement(n) };
            (model, pre)
        }
        AgTruth(a, f) | AgLie(a, f) | AgBluff(a, f) => {
            let ai = m.agent_index(a)?;
            let e = m.extension(f)?;
            let believes = m.box_set(ai, &e);
            let believes_not = m.box_set(ai, &e.complement(n));
            let model = cut_arrows(m, &believes, |b| b != ai);
            let pre = match ann {
                AgTruth(..) => believes,
                AgLie(..) => believes_not,
                _ => believes.union(&believes_not).complement(n),
            };
            (model, pre)
        }
        other => return Err(ModelError::Unsupported(format!("[{other}] is not a direct announcement"))),
    };
    Ok(Transformed { model, pre, image: (0..n).map(Some).collect() })
}

/// Execute a direct announcement at the point. Returns `None` when the
/// precondition fails there. The point keeps its identity.
pub fn announce(pm: &PointedModel, ann: &Announcement) -> Result<Option<PointedModel>> {
    let t = transform_direct(&pm.model, ann)?;
    if !t.pre.contains(pm.point) {
        return Ok(None);
    }
    Ok(Some(PointedModel { model: t.model, point: pm.point }))
}

/// How a speaker's utterance relates to the speaker's own beliefs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// The speaker believes what is said.
    Truthful,
    /// The speaker believes the opposite of what is said.
    Lying,
    /// The speaker believes neither.
    Bluffing,
}

impl Flavor {
    pub fn keyword(self) -> &'static str {
        match self {
            Flavor::Truthful => "truth",
            Flavor::Lying => "lie",
            Flavor::Bluffing => "bluff",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Flavor> {
        match s {
            "truth" => Some(Flavor::Truthful),
            "lie" => Some(Flavor::Lying),
            "bluff" => Some(Flavor::Bluffing),
            _ => None,
        }
    }

    /// The agent announcement of this flavor.
    pub fn announcement(self, speaker: Agent, f: Formula) -> Announcement {
        match self {
            Flavor::Truthful => Announcement::AgTruth(speaker, f),
            Flavor::Lying => Announcement::AgLie(speaker, f),
            Flavor::Bluffing => Announcement::AgBluff(speaker, f),
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// Which flavor an announcement of `f` by `speaker` would have at the point.
///
/// Fails when the speaker has no accessible states, since the speaker would
/// then believe both `f` and its negation.
pub fn classify(pm: &PointedModel, speaker: &Agent, f: &Formula) -> Result<Flavor> {
    let a = pm.model.agent_index(speaker)?;
    if pm.model.successors(a, pm.point).is_empty() {
        return Err(ModelError::Inconsistent(format!(
            "{speaker} has inconsistent beliefs at {}",
            pm.point_name()
        )));
    }
    let believes = |g: Formula| pm.eval(&Formula::Believes(speaker.clone(), Box::new(g)));
    if believes(f.clone())? {
        Ok(Flavor::Truthful)
    } else if believes(Formula::not(f.clone()))? {
        Ok(Flavor::Lying)
    } else {
        Ok(Flavor::Bluffing)
    }
}

/// What an observer makes of a speaker announcing `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detection {
    /// The observer believes `f` is false but that the speaker believes it.
    BelievesMistake,
    /// The observer believes the speaker believes `f` is false.
    BelievesLie,
    Neither,
}

/// Evaluate the observer's verdict. Call this on the model before the
/// announcement: afterwards the observer may have no accessible states left.
///
/// Fails when both verdicts hold, which requires the observer to consider
/// possible only states where the speaker's beliefs are inconsistent.
pub fn detect(pm: &PointedModel, observer: &Agent, speaker: &Agent, f: &Formula) -> Result<Detection> {
    let b = |g: Formula| Formula::Believes(observer.clone(), Box::new(g));
    let sp = |g: Formula| Formula::Believes(speaker.clone(), Box::new(g));
    let mistake = pm.eval(&b(Formula::and(Formula::not(f.clone()), sp(f.clone()))))?;
    let lie = pm.eval(&b(sp(Formula::not(f.clone()))))?;
    match (mistake, lie) {
        (true, true) => Err(ModelError::Inconsistent(format!(
            "{observer} would believe both that {speaker} is mistaken and that {speaker} lies"
        ))),
        (true, false) => Ok(Detection::BelievesMistake),
        (false, true) => Ok(Detection::BelievesLie),
        (false, false) => Ok(Detection::Neither),
    }
}
