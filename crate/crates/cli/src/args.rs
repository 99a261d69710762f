use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use powalt_core::alternative::Budgets;

#[derive(Parser, Debug)]
#[command(name = "powalt", version, about = "Power alternatives in groups acting on trees and in Artin groups")]
pub struct Cli {
    #[command(flatten)]
    pub budgets: BudgetArgs,

    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,

    /// Worker threads for word enumeration (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Profile {
    Standard,
    Quick,
    Thorough,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Default budget profile; individual flags override it.
    #[arg(long, global = true, env = "POWALT_PROFILE", value_enum, default_value_t = Profile::Standard)]
    pub profile: Profile,

    /// Verification length L for word enumeration.
    #[arg(long, global = true)]
    pub max_word_len: Option<usize>,

    /// Window W: axis fundamental domains or ray steps explored.
    #[arg(long, global = true)]
    pub window: Option<usize>,

    /// Largest exponent n tried by exponent searches.
    #[arg(long, global = true)]
    pub max_exponent: Option<u32>,

    /// Cap on tree vertices expanded by one query.
    #[arg(long, global = true)]
    pub node_budget: Option<usize>,
}

/// Budgets after applying the profile and the flag overrides.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub verify_length: usize,
    pub window: usize,
    pub max_exponent: u32,
    pub node_budget: usize,
}

impl Profile {
    pub fn limits(self) -> Limits {
        match self {
            Profile::Standard => Limits {
                verify_length: 10,
                window: 8,
                max_exponent: 24,
                node_budget: 100_000,
            },
            Profile::Quick => Limits {
                verify_length: 8,
                window: 4,
                max_exponent: 12,
                node_budget: 20_000,
            },
            Profile::Thorough => Limits {
                verify_length: 12,
                window: 12,
                max_exponent: 48,
                node_budget: 1_000_000,
            },
        }
    }
}

impl BudgetArgs {
    pub fn resolve(&self) -> Limits {
        let base = self.profile.limits();
        Limits {
            verify_length: self.max_word_len.unwrap_or(base.verify_length),
            window: self.window.unwrap_or(base.window),
            max_exponent: self.max_exponent.unwrap_or(base.max_exponent),
            node_budget: self.node_budget.unwrap_or(base.node_budget),
        }
    }
}

impl Limits {
    pub fn engine(&self) -> Budgets {
        Budgets {
            verify_length: self.verify_length,
            max_exponent: self.max_exponent,
            window: self.window,
            ..Budgets::default()
        }
    }
}

/// Exactly one group source.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GroupArgs {
    /// Graph-of-groups JSON document.
    #[arg(long, value_name = "FILE")]
    pub gog: Option<PathBuf>,

    /// Artin defining graph, DOT-like or JSON.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,

    /// Group description JSON of any supported kind.
    #[arg(long, value_name = "FILE")]
    pub group: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Upa0,
    Upa,
    Pa,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Graph conditions and the property flags they imply.
    ClassifyGraph {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Uniform power exponent from the edge labels.
    Exponent {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Visual splittings over separating complete subgraphs.
    Split {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Recursive reduction tree along preferred splittings.
    Reduce {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
    },
    /// Decide the power alternative for a pair of elements.
    PairCheck {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, allow_hyphen_values = true)]
        h: String,
    },
    /// Replay a freeness certificate from its own contents.
    CertifyVerify {
        #[arg(long, value_name = "FILE")]
        cert: PathBuf,
        /// Replay length; defaults to the length recorded in the certificate.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Pointwise stabilisers along the ray towards `ray^{+∞}`.
    ProbeStabilisation {
        #[arg(long, value_name = "FILE")]
        gog: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        ray: String,
    },
    /// Kernel presentation of the dihedral Artin group A(m).
    Dihedral {
        #[arg(long)]
        m: u32,
    },
    /// Search a generating set for a pair whose m-th powers generate a free group.
    Growth {
        #[arg(long, value_name = "FILE")]
        graph: PathBuf,
        /// Comma-separated words; defaults to the standard generators.
        #[arg(long, value_delimiter = ',')]
        generators: Vec<String>,
        /// Exponent; defaults to the adjusted uniform exponent.
        #[arg(long)]
        m: Option<u32>,
    },
    /// Derive class membership from a fact file.
    UpaDerive {
        #[arg(long, value_name = "FILE")]
        facts: PathBuf,
        /// Goal group; defaults to the goal in the fact file.
        #[arg(long)]
        goal: Option<String>,
        #[arg(long, value_enum, requires = "goal")]
        class: Option<ClassArg>,
    },
    /// Test a law on random tuples.
    LawCheck {
        #[command(flatten)]
        group: GroupArgs,
        /// Law word; letters are numbered by first appearance, e.g. `[[x1,x2],[x3,x4]]`.
        #[arg(long)]
        law: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        max_len: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
    },
    /// Time a fixed suite of engine operations.
    Bench {
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}
