//! Smoothed RTT / RTO estimation (Jacobson-Karels with Karn's rule left to
//! the caller). Shared by the consumer transport and the FIB freshness rule.

use crate::sim::SimTime;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RtoParams {
    pub initial: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for RtoParams {
    fn default() -> Self {
        RtoParams {
            initial: 2.0,
            min: 0.2,
            max: 60.0,
        }
    }
}

/// Times are seconds as `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct RttEstimator {
    srtt: Option<f64>,
    rttvar: f64,
    rto: f64,
    params: RtoParams,
}

impl RttEstimator {
    pub fn new(params: RtoParams) -> Self {
        assert!(
            params.min > 0.0 && params.min <= params.max,
            "invalid RTO clamp [{}, {}]",
            params.min,
            params.max
        );
        RttEstimator {
            srtt: None,
            rttvar: 0.0,
            rto: params.initial.clamp(params.min, params.max),
            params,
        }
    }

    pub fn srtt(&self) -> Option<f64> {
        self.srtt
    }

    pub fn rttvar(&self) -> f64 {
        self.rttvar
    }

    pub fn rto(&self) -> f64 {
        self.rto
    }

    pub fn rto_time(&self) -> SimTime {
        SimTime::from_secs_f64(self.rto)
    }

    pub fn params(&self) -> RtoParams {
        self.params
    }

    /// Feed one RTT measurement, in seconds.
    pub fn on_sample(&mut self, rtt: f64) -> Result<(), Error> {
        if !(rtt > 0.0) || !rtt.is_finite() {
            return Err(Error::InvalidRttSample(rtt));
        }
        match self.srtt {
            None => {
                self.srtt = Some(rtt);
                self.rttvar = rtt / 2.0;
            }
            Some(srtt) => {
                self.rttvar = 0.75 * self.rttvar + 0.25 * (srtt - rtt).abs();
                self.srtt = Some(0.875 * srtt + 0.125 * rtt);
            }
        }
        let srtt = self.srtt.expect("set above");
        self.rto = (srtt + 4.0 * self.rttvar).clamp(self.params.min, self.params.max);
        Ok(())
    }

    /// Exponential backoff after a timeout.
    pub fn backoff(&mut self) {
        self.rto = (2.0 * self.rto).min(self.params.max);
    }
}

impl Default for RttEstimator {
    fn default() -> Self {
        RttEstimator::new(RtoParams::default())
    }
}
