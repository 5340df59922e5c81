//! Discover the regions of state space whose traversal explains trajectory rewards.
//!
//! A region is a hyper-sphere `(C, ε)`; a trajectory activates it when any of
//! its states falls inside. Regions are found greedily by minimizing the
//! conditional entropy of rewards given region-visit indicators. The
//! indicator is relaxed to a sigmoid of sharpness α, α is annealed upward
//! during gradient descent, and every restart is seeded from a Gaussian KDE
//! over the states of successful trajectories.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`trajectory`] | states, trajectories, datasets, regions, membership |
//! | [`corpus`] | line-delimited JSON corpus reader/writer |
//! | [`reward`] | reward alphabets and 1-D k-means discretization |
//! | [`entropy`] | joint tables, entropies, the relaxed objective and its gradient |
//! | [`kde`] | Gaussian KDE and center seeding |
//! | [`optimizer`] | annealed gradient descent for one region |
//! | [`discovery`] | multi-stage, multi-restart driver and its report |
//! | [`oracle`] | brute-force grid search reference |
//! | [`synth`] | planted paint/door/null scenarios |
//! | [`eval`] | scoring and plot-ready CSV |
//! | [`config`] | flat key/value run configuration |
//!
//! ```
//! use trajregions::prelude::*;
//!
//! let (data, _truth) = synth::gen_paint(&TaskSpec::paint(2, 7)).unwrap();
//! let labels = discretize_rewards(&data.rewards(), 2).unwrap();
//! let config = DiscoveryConfig { m: 1, n_restart: 2, seed: 7, ..Default::default() };
//! let report = discover(&data, &labels, &config).unwrap();
//! assert_eq!(report.regions.len(), 1);
//! ```

pub mod config;
pub mod corpus;
pub mod discovery;
pub mod entropy;
mod error;
pub mod eval;
pub mod kde;
pub mod optimizer;
pub mod oracle;
pub mod reward;
pub mod rng;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::config::RunConfig;
    pub use crate::corpus::{load_corpus, read_corpus, save_corpus, write_corpus};
    pub use crate::discovery::{discover, discover_with_traces, DiscoveryConfig, DiscoveryReport};
    pub use crate::entropy::{
        conditional_entropy, estimate_joint, information_gain, marginal_entropy,
        objective_with_gradient, JointTable, MembershipMatrix, Objective,
    };
    pub use crate::kde::{kde_density, sample_center, Bandwidth, InitConfig};
    pub use crate::optimizer::{optimize_region, AnnealSchedule, OptimConfig, OptimTrace};
    pub use crate::oracle::{grid_search, grid_search_default};
    pub use crate::reward::{discretize_rewards, RewardAlphabet};
    pub use crate::synth::{self, TaskKind, TaskSpec, Truth};
    pub use crate::trajectory::{
        hard_membership, min_sq_dist, soft_membership, Dataset, RadiusBounds, Region, State,
        Trajectory,
    };
    pub use crate::{Error, Result};
}
