//! Streaming `R^B` trace monitor for posterior samplers.

use crate::error::{domain, Result};
use crate::probkit::ScalarDistribution;

/// Alert when the cumulative exceedance rate is above `factor` times the
/// nominal tail mass after at least `min_draws` valid draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlertRule {
    pub factor: f64,
    pub min_draws: usize,
}

impl Default for AlertRule {
    fn default() -> Self {
        Self {
            factor: 3.0,
            min_draws: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRecord {
    /// Zero-based position in the stream, counting invalid draws.
    pub index: usize,
    /// `None` when the draw could not be evaluated.
    pub value: Option<f64>,
    pub exceed: Option<bool>,
    /// Exceedances over valid draws so far.
    pub rate: f64,
    /// The alert condition holds at this record.
    pub alert: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSummary {
    pub draws: usize,
    pub valid: usize,
    pub exceedances: usize,
    pub rate: f64,
    pub nominal: f64,
    /// Index of the first record with the alert condition.
    pub first_alert: Option<usize>,
}

/// Constant-memory running state.
#[derive(Debug, Clone)]
pub struct RbMonitor {
    threshold: f64,
    nominal: f64,
    rule: AlertRule,
    seen: usize,
    valid: usize,
    exceed: usize,
    first_alert: Option<usize>,
}

impl RbMonitor {
    /// `dof` is `K - 1` of the bin scheme that produced the values.
    pub fn new(dof: usize, threshold: f64, rule: AlertRule) -> Result<Self> {
        if !threshold.is_finite() || threshold < 0.0 {
            return domain(format!("monitor threshold {threshold} must be finite and >= 0"));
        }
        if !(rule.factor > 0.0) {
            return domain("alert factor must be > 0");
        }
        let nominal = ScalarDistribution::chi_squared(dof as f64)?.survival(threshold);
        Ok(Self {
            threshold,
            nominal,
            rule,
            seen: 0,
            valid: 0,
            exceed: 0,
            first_alert: None,
        })
    }

    pub fn push(&mut self, value: Option<f64>) -> MonitorRecord {
        let index = self.seen;
        self.seen += 1;
        let value = value.filter(|v| v.is_finite());
        let exceed = value.map(|v| v > self.threshold);
        if let Some(e) = exceed {
            self.valid += 1;
            self.exceed += e as usize;
        }
        let rate = self.rate();
        let alert = self.valid >= self.rule.min_draws && rate > self.rule.factor * self.nominal;
        if alert && self.first_alert.is_none() {
            self.first_alert = Some(index);
        }
        MonitorRecord {
            index,
            value,
            exceed,
            rate,
            alert,
        }
    }

    fn rate(&self) -> f64 {
        if self.valid == 0 {
            0.0
        } else {
            self.exceed as f64 / self.valid as f64
        }
    }

    pub fn summary(&self) -> MonitorSummary {
        MonitorSummary {
            draws: self.seen,
            valid: self.valid,
            exceedances: self.exceed,
            rate: self.rate(),
            nominal: self.nominal,
            first_alert: self.first_alert,
        }
    }
}

/// Feed a stream of parameter draws through `evaluate` (which returns `R^B`)
/// and `monitor`, handing each record to `sink`.
///
/// Draws that fail to parse or evaluate are recorded as invalid and the
/// stream continues.
pub fn rb_monitor<P, I, F, S>(draws: I, mut evaluate: F, monitor: &mut RbMonitor, mut sink: S) -> MonitorSummary
where
    I: IntoIterator<Item = Result<P>>,
    F: FnMut(&P) -> Result<f64>,
    S: FnMut(&MonitorRecord),
{
    for d in draws {
        let value = d.and_then(|p| evaluate(&p)).ok();
        sink(&monitor.push(value));
    }
    monitor.summary()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn empty_stream() {
        let mut m = RbMonitor::new(4, 9.4877, AlertRule::default()).unwrap();
        let mut n = 0;
        let s = rb_monitor(Vec::<Result<f64>>::new(), |&v| Ok(v), &mut m, |_| n += 1);
        assert_eq!(n, 0);
        assert_eq!(s.draws, 0);
        assert!(s.first_alert.is_none());
        assert!((s.nominal - 0.05).abs() < 1e-5);
    }

    #[test]
    fn invalid_draws_are_tolerated() {
        let mut m = RbMonitor::new(4, 9.4877, AlertRule::default()).unwrap();
        let draws = vec![Ok(1.0), Err(Error::Domain("bad line".into())), Ok(20.0), Ok(f64::NAN)];
        let mut recs = Vec::new();
        let s = rb_monitor(draws, |&v| Ok(v), &mut m, |r| recs.push(*r));
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[1].value, None);
        assert_eq!(recs[3].exceed, None);
        assert_eq!(recs[2].exceed, Some(true));
        assert_eq!((s.valid, s.exceedances), (2, 1));
        assert_eq!(s.rate, 0.5);
        // too few draws for an alert
        assert!(s.first_alert.is_none());
    }

    #[test]
    fn alert_waits_for_min_draws() {
        let mut m = RbMonitor::new(4, 9.4877, AlertRule::default()).unwrap();
        let draws = (0..300).map(|_| Ok(100.0));
        let s = rb_monitor(draws, |&v| Ok(v), &mut m, |_| {});
        assert_eq!(s.first_alert, Some(199));
    }
}
