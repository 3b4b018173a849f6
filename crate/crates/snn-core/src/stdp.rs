/// Pair-based, pre-centric plasticity rule with nearest-neighbour matching.
///
/// The rule is evaluated once per plastic synapse at the end of every step in
/// which the presynaptic neuron fired. Only the most recent postsynaptic fire
/// at or before the presynaptic one is consulted:
///
/// * no postsynaptic fire yet: the weight is unchanged;
/// * exact coincidence (same step): potentiate by `a_plus`, capped at `w_max`;
/// * postsynaptic fire 1..=`depression_window` steps earlier: depress by
///   `a_minus`, clamped at `w_min`;
/// * anything older: unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StdpRule {
    pub a_plus: f64,
    pub a_minus: f64,
    pub w_init: f64,
    pub w_min: f64,
    pub w_max: f64,
    pub depression_window: usize,
}

impl Default for StdpRule {
    fn default() -> Self {
        StdpRule {
            a_plus: 0.6,
            a_minus: 1.2,
            w_init: 0.0,
            w_min: 0.0,
            w_max: 1.2,
            depression_window: 3,
        }
    }
}

impl StdpRule {
    /// Weight after a presynaptic fire at `t_pre`, given the most recent
    /// postsynaptic fire at or before `t_pre`.
    pub fn on_pre_spike(&self, t_pre: usize, last_post: Option<usize>, w: f64) -> f64 {
        let Some(post) = last_post else { return w };
        debug_assert!(post <= t_pre, "postsynaptic fire from the future");
        let dt = t_pre - post;
        if dt == 0 {
            (w + self.a_plus).min(self.w_max)
        } else if dt <= self.depression_window {
            (w - self.a_minus).max(self.w_min)
        } else {
            w
        }
    }

    pub(crate) fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("a_plus", self.a_plus),
            ("a_minus", self.a_minus),
            ("w_init", self.w_init),
            ("w_min", self.w_min),
            ("w_max", self.w_max),
        ] {
            if !v.is_finite() {
                return Err(format!("{name} must be finite"));
            }
        }
        if self.a_plus <= 0.0 {
            return Err("a_plus must be positive".into());
        }
        if self.a_minus <= 0.0 {
            return Err("a_minus must be positive".into());
        }
        if self.w_min > self.w_init || self.w_init > self.w_max {
            return Err(format!(
                "w_init {} outside [{}, {}]",
                self.w_init, self.w_min, self.w_max
            ));
        }
        if self.depression_window == 0 {
            return Err("depression window must cover at least one step".into());
        }
        Ok(())
    }
}
