/// Where a metric value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Analytic,
    MonteCarlo,
}

/// A coverage probability or average rate together with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricResult<T> {
    pub value: T,
    pub method: Method,
    /// Satellite count the value was computed for (real for analytic results).
    pub n_used: T,
    /// Quadrature error estimate (analytic) or 95% confidence half-width
    /// (Monte Carlo).
    pub uncertainty: T,
    pub trials: Option<usize>,
}
