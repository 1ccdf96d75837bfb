use crate::error::{Error, Result};
use crate::ifs::{AttractorCloud, IfsSystem, SpatialGrid};
use crate::words::DriverStream;

/// One recovery-time measurement.
///
/// `n` is the first index at which `x_0, …, x_n` cover the cloud with closed
/// `eps`-balls. Because the cloud lies in `A`, the true recovery time for
/// `A` is at least `n`, and at most `n_outer` (the same search at radius
/// `eps − guard`, with `guard` the cloud resolution) when that was computed.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryRecord {
    pub driver: String,
    pub x0: Vec<f64>,
    pub eps: f64,
    /// `None` when the cap was reached first.
    pub n: Option<u64>,
    pub guard: f64,
    /// `Some(..)` only when the outer radius was searched as well.
    pub n_outer: Option<Option<u64>>,
    pub cap: u64,
}

/// Uncovered cloud points for one radius.
struct Tracker {
    eps: f64,
    grid: SpatialGrid,
    hit: Option<u64>,
}

impl Tracker {
    fn new(cloud: &AttractorCloud, eps: f64) -> Self {
        Self {
            eps,
            grid: SpatialGrid::new(cloud.coords(), cloud.dim(), eps),
            hit: None,
        }
    }

    fn visit(&mut self, coords: &[f64], x: &[f64], n: u64) {
        if self.hit.is_none() {
            self.grid.remove_within(coords, x, self.eps);
            if self.grid.is_empty() {
                self.hit = Some(n);
            }
        }
    }
}

/// First `n ≤ cap` at which the orbit of `x0` under a copy of `driver`
/// covers the cloud at radius `eps`.
pub fn recovery_time(
    ifs: &IfsSystem,
    driver: &DriverStream,
    x0: &[f64],
    eps: f64,
    cloud: &AttractorCloud,
    cap: u64,
) -> Result<RecoveryRecord> {
    let mut out = recovery_times(ifs, driver, x0, &[eps], cloud, cap, false)?;
    Ok(out.pop().expect("one radius in, one record out"))
}

/// Recovery times for several radii from a single orbit pass. With
/// `certify`, each radius is also searched at `eps − guard`.
pub fn recovery_times(
    ifs: &IfsSystem,
    driver: &DriverStream,
    x0: &[f64],
    eps_list: &[f64],
    cloud: &AttractorCloud,
    cap: u64,
    certify: bool,
) -> Result<Vec<RecoveryRecord>> {
    ifs.check_point(x0)?;
    if cloud.dim() != ifs.dim() {
        return Err(Error::InvalidInput(
            "cloud and IFS dimensions differ".into(),
        ));
    }
    let guard = cloud.resolution();
    let mut trackers = Vec::with_capacity(eps_list.len() * 2);
    for &eps in eps_list {
        if !(eps > guard && eps.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "eps = {eps} must exceed the cloud resolution {guard}"
            )));
        }
        trackers.push(Tracker::new(cloud, eps));
        if certify {
            trackers.push(Tracker::new(cloud, eps - guard));
        }
    }
    let coords = cloud.coords();
    let mut pending = trackers.len();
    let mut x = x0.to_vec();
    let mut next = vec![0.0; x.len()];
    let mut driver = driver.clone();
    let mut n = 0u64;
    loop {
        for t in trackers.iter_mut().filter(|t| t.hit.is_none()) {
            t.visit(coords, &x, n);
            if t.hit.is_some() {
                pending -= 1;
            }
        }
        if pending == 0 || n >= cap {
            break;
        }
        let s = driver.next_symbol()?;
        ifs.map(s)?.apply(&x, &mut next);
        std::mem::swap(&mut x, &mut next);
        n += 1;
    }
    let stride = if certify { 2 } else { 1 };
    Ok(eps_list
        .iter()
        .enumerate()
        .map(|(i, &eps)| RecoveryRecord {
            driver: driver.label().to_string(),
            x0: x0.to_vec(),
            eps,
            n: trackers[i * stride].hit,
            guard,
            n_outer: certify.then(|| trackers[i * stride + 1].hit),
            cap,
        })
        .collect())
}

/// Whether closed `eps`-balls around `orbit` (flat coordinates) cover every
/// cloud point. Independent of the incremental search.
pub fn orbit_covers(cloud: &AttractorCloud, orbit: &[f64], eps: f64) -> bool {
    let dim = cloud.dim();
    let grid = SpatialGrid::new(orbit, dim, eps);
    cloud.points().all(|p| grid.any_within(orbit, p, eps))
}
