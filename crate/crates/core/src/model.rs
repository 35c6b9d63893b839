//! Algebraic layer of the peasant/bandit/mafia economy.
//!
//! Every quantity here is a pure function of the current stocks, the
//! exogenous [`Parameters`] and the structural [`Overrides`]. The stock
//! derivatives returned by [`derivatives`] are what the integrator advances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Exogenous constants of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Output per peasant per month.
    #[serde(rename = "a_P")]
    pub marginal_product: f64,
    /// Effectiveness of bandit technology.
    #[serde(rename = "theta_B")]
    pub bandit_technology: f64,
    /// Mafiosi needed per bandit under full control.
    #[serde(rename = "theta_M")]
    pub mafia_effectiveness: f64,
    /// Compensating differential added to the protection price.
    #[serde(rename = "c_M")]
    pub mafia_fixed_cost: f64,
    #[serde(rename = "lambda_A")]
    pub authority_control: f64,
    #[serde(rename = "tbar_M")]
    pub max_tribute_share: f64,
    /// Income perception delay, months.
    #[serde(rename = "tau")]
    pub perception_delay: f64,
    #[serde(rename = "tau_B")]
    pub bandit_delay: f64,
    #[serde(rename = "tau_M")]
    pub mafia_delay: f64,
    /// Conserved total population `P + B + M`.
    #[serde(rename = "N")]
    pub population: f64,
}

impl Parameters {
    /// Pre-unification parameters of the base run.
    pub fn base() -> Self {
        Parameters {
            marginal_product: 10.0,
            bandit_technology: 3.0,
            mafia_effectiveness: 0.2,
            mafia_fixed_cost: 10.0,
            authority_control: 0.9,
            max_tribute_share: 0.2,
            perception_delay: 10.0,
            bandit_delay: 3.0,
            mafia_delay: 5.0,
            population: 110.0,
        }
    }

    /// Base parameters with the low marginal product.
    pub fn low_output() -> Self {
        Parameters {
            marginal_product: 1.0,
            ..Self::base()
        }
    }

    pub fn get(&self, name: ParameterName) -> f64 {
        match name {
            ParameterName::MarginalProduct => self.marginal_product,
            ParameterName::BanditTechnology => self.bandit_technology,
            ParameterName::MafiaEffectiveness => self.mafia_effectiveness,
            ParameterName::MafiaFixedCost => self.mafia_fixed_cost,
            ParameterName::AuthorityControl => self.authority_control,
            ParameterName::MaxTributeShare => self.max_tribute_share,
            ParameterName::PerceptionDelay => self.perception_delay,
            ParameterName::BanditDelay => self.bandit_delay,
            ParameterName::MafiaDelay => self.mafia_delay,
            ParameterName::Population => self.population,
        }
    }

    pub fn set(&mut self, name: ParameterName, value: f64) {
        let slot = match name {
            ParameterName::MarginalProduct => &mut self.marginal_product,
            ParameterName::BanditTechnology => &mut self.bandit_technology,
            ParameterName::MafiaEffectiveness => &mut self.mafia_effectiveness,
            ParameterName::MafiaFixedCost => &mut self.mafia_fixed_cost,
            ParameterName::AuthorityControl => &mut self.authority_control,
            ParameterName::MaxTributeShare => &mut self.max_tribute_share,
            ParameterName::PerceptionDelay => &mut self.perception_delay,
            ParameterName::BanditDelay => &mut self.bandit_delay,
            ParameterName::MafiaDelay => &mut self.mafia_delay,
            ParameterName::Population => &mut self.population,
        };
        *slot = value;
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        ParameterName::ALL
            .iter()
            .try_for_each(|&name| name.check(self.get(name)))
    }
}

/// Names of the [`Parameters`] fields as they appear in scenario files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParameterName {
    MarginalProduct,
    BanditTechnology,
    MafiaEffectiveness,
    MafiaFixedCost,
    AuthorityControl,
    MaxTributeShare,
    PerceptionDelay,
    BanditDelay,
    MafiaDelay,
    Population,
}

impl ParameterName {
    pub const ALL: [ParameterName; 10] = [
        ParameterName::MarginalProduct,
        ParameterName::BanditTechnology,
        ParameterName::MafiaEffectiveness,
        ParameterName::MafiaFixedCost,
        ParameterName::AuthorityControl,
        ParameterName::MaxTributeShare,
        ParameterName::PerceptionDelay,
        ParameterName::BanditDelay,
        ParameterName::MafiaDelay,
        ParameterName::Population,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParameterName::MarginalProduct => "a_P",
            ParameterName::BanditTechnology => "theta_B",
            ParameterName::MafiaEffectiveness => "theta_M",
            ParameterName::MafiaFixedCost => "c_M",
            ParameterName::AuthorityControl => "lambda_A",
            ParameterName::MaxTributeShare => "tbar_M",
            ParameterName::PerceptionDelay => "tau",
            ParameterName::BanditDelay => "tau_B",
            ParameterName::MafiaDelay => "tau_M",
            ParameterName::Population => "N",
        }
    }

    /// Checks `value` against this field's domain.
    pub fn check(self, value: f64) -> Result<(), ModelError> {
        let ok = value.is_finite()
            && match self {
                ParameterName::MafiaEffectiveness
                | ParameterName::AuthorityControl
                | ParameterName::MaxTributeShare => (0.0..=1.0).contains(&value),
                _ => value > 0.0,
            };
        if ok {
            Ok(())
        } else {
            Err(ModelError::InvalidParameter {
                name: self.as_str(),
                value,
            })
        }
    }
}

impl fmt::Display for ParameterName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParameterName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParameterName::ALL
            .iter()
            .copied()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| ModelError::UnknownParameter(s.to_string()))
    }
}

/// Structural switches that replace an equation with zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overrides {
    /// Forces protection demand `D_M` to zero.
    pub demand_zero: bool,
    /// Forces potential bandits `B*` to zero.
    pub potential_bandits_zero: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OverrideName {
    DemandZero,
    PotentialBanditsZero,
}

impl OverrideName {
    pub const ALL: [OverrideName; 2] =
        [OverrideName::DemandZero, OverrideName::PotentialBanditsZero];

    pub fn as_str(self) -> &'static str {
        match self {
            OverrideName::DemandZero => "demand_zero",
            OverrideName::PotentialBanditsZero => "potential_bandits_zero",
        }
    }
}

impl Overrides {
    pub fn get(&self, name: OverrideName) -> bool {
        match name {
            OverrideName::DemandZero => self.demand_zero,
            OverrideName::PotentialBanditsZero => self.potential_bandits_zero,
        }
    }

    pub fn set(&mut self, name: OverrideName, on: bool) {
        match name {
            OverrideName::DemandZero => self.demand_zero = on,
            OverrideName::PotentialBanditsZero => self.potential_bandits_zero = on,
        }
    }
}

impl fmt::Display for OverrideName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OverrideName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OverrideName::ALL
            .iter()
            .copied()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| ModelError::UnknownOverride(s.to_string()))
    }
}

/// Integrated state at one instant.
///
/// Peasants are the residual `N - B - M`; use [`StockState::from_criminals`]
/// to keep that identity exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StockState {
    pub t: f64,
    pub peasants: f64,
    pub bandits: f64,
    pub mafia: f64,
    pub perceived_peasant_income: f64,
    pub perceived_bandit_income: f64,
}

impl StockState {
    pub fn from_criminals(
        t: f64,
        population: f64,
        bandits: f64,
        mafia: f64,
        perceived_peasant_income: f64,
        perceived_bandit_income: f64,
    ) -> Self {
        StockState {
            t,
            peasants: population - bandits - mafia,
            bandits,
            mafia,
            perceived_peasant_income,
            perceived_bandit_income,
        }
    }

    pub fn total(&self) -> f64 {
        self.peasants + self.bandits + self.mafia
    }

    pub fn validate(&self, population: f64) -> Result<(), ModelError> {
        let fields = [
            ("P", self.peasants),
            ("B", self.bandits),
            ("M", self.mafia),
            ("ihat_P", self.perceived_peasant_income),
            ("ihat_B", self.perceived_bandit_income),
        ];
        for (name, value) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::InvalidState { name, value });
            }
        }
        if (self.total() - population).abs() >= 1e-9 * population {
            return Err(ModelError::Conservation {
                total: self.total(),
                population,
            });
        }
        Ok(())
    }
}

/// Every algebraic quantity derived from a [`StockState`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuxiliaryValues {
    pub output: f64,
    pub avoidance: f64,
    pub theft_success: f64,
    pub appropriations: f64,
    pub tribute: f64,
    pub bandit_income: f64,
    pub income_per_bandit: f64,
    pub protection_payment: f64,
    pub peasant_income: f64,
    pub income_per_peasant: f64,
    pub attractiveness: f64,
    pub potential_bandits: f64,
    pub willingness_to_pay: f64,
    pub protection_budget: f64,
    pub protection_spending: f64,
    pub protection_price: f64,
    pub protection_demand: f64,
    pub required_mafia: f64,
    pub mafia_control: f64,
    pub lawlessness: f64,
    pub integrity: f64,
}

impl AuxiliaryValues {
    /// `(symbol, value)` pairs in dependency-free display order.
    pub fn named_values(&self) -> [(&'static str, f64); 21] {
        [
            ("Y", self.output),
            ("F", self.avoidance),
            ("pi", self.theft_success),
            ("R_B", self.appropriations),
            ("T_B", self.tribute),
            ("I_B", self.bandit_income),
            ("i_B", self.income_per_bandit),
            ("T_P", self.protection_payment),
            ("I_P", self.peasant_income),
            ("i_P", self.income_per_peasant),
            ("attractiveness", self.attractiveness),
            ("B_star", self.potential_bandits),
            ("W", self.willingness_to_pay),
            ("L", self.protection_budget),
            ("l", self.protection_spending),
            ("p_M", self.protection_price),
            ("D_M", self.protection_demand),
            ("m_B", self.required_mafia),
            ("lambda_M", self.mafia_control),
            ("lawlessness", self.lawlessness),
            ("integrity", self.integrity),
        ]
    }

    pub fn first_non_finite(&self) -> Option<&'static str> {
        self.named_values()
            .into_iter()
            .find(|(_, v)| !v.is_finite())
            .map(|(name, _)| name)
    }
}

/// Time derivatives of the independent stocks.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StateDerivative {
    pub bandits: f64,
    pub mafia: f64,
    pub perceived_peasant_income: f64,
    pub perceived_bandit_income: f64,
}

impl StateDerivative {
    pub fn max_abs(&self) -> f64 {
        [
            self.bandits,
            self.mafia,
            self.perceived_peasant_income,
            self.perceived_bandit_income,
        ]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max)
    }
}

/// Probability that a peasant avoids being robbed, `1 / (1 + θ_B·B/P)`.
///
/// With no peasants left and bandits present the probability is 0.
pub fn avoidance_probability(bandits: f64, peasants: f64, bandit_technology: f64) -> f64 {
    if bandits <= 0.0 {
        1.0
    } else if peasants <= 0.0 {
        0.0
    } else {
        1.0 / (1.0 + bandit_technology * bandits / peasants)
    }
}

pub fn theft_success(authority_control: f64, mafia_control: f64) -> f64 {
    (1.0 - authority_control) * (1.0 - mafia_control)
}

pub fn bandit_appropriations(theft_success: f64, avoidance: f64, output: f64) -> f64 {
    theft_success * (1.0 - avoidance) * output
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BanditIncome {
    pub tribute: f64,
    pub disposable: f64,
    pub per_bandit: f64,
}

pub fn bandit_income(
    appropriations: f64,
    mafia_control: f64,
    max_tribute_share: f64,
    bandits: f64,
) -> BanditIncome {
    let tribute = max_tribute_share * mafia_control * appropriations;
    let disposable = appropriations - tribute;
    let per_bandit = if bandits > 0.0 {
        disposable / bandits
    } else {
        0.0
    };
    BanditIncome {
        tribute,
        disposable,
        per_bandit,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeasantIncome {
    pub protection_payment: f64,
    /// May be negative when theft and protection exceed output.
    pub disposable: f64,
    pub per_peasant: f64,
}

pub fn peasant_income(
    output: f64,
    appropriations: f64,
    protection_price: f64,
    mafia: f64,
    peasants: f64,
) -> PeasantIncome {
    let protection_payment = protection_price * mafia;
    let disposable = output - appropriations - protection_payment;
    let per_peasant = if peasants > 0.0 {
        disposable / peasants
    } else {
        0.0
    };
    PeasantIncome {
        protection_payment,
        disposable,
        per_peasant,
    }
}

/// Share of the non-mafia population that would rather be bandits.
pub fn banditry_attractiveness(perceived_bandit_income: f64, perceived_peasant_income: f64) -> f64 {
    let total = perceived_bandit_income + perceived_peasant_income;
    if perceived_bandit_income <= 0.0 || total <= 0.0 {
        0.0
    } else {
        (perceived_bandit_income / total).min(1.0)
    }
}

pub fn potential_bandits(
    peasants: f64,
    bandits: f64,
    attractiveness: f64,
    overrides: Overrides,
) -> f64 {
    if overrides.potential_bandits_zero {
        0.0
    } else {
        (peasants + bandits) * attractiveness
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtectionMarket {
    pub willingness_to_pay: f64,
    pub budget: f64,
    pub spending: f64,
    pub price: f64,
    pub demand: f64,
}

pub fn protection_market(
    appropriations: f64,
    peasant_income: f64,
    perceived_peasant_income: f64,
    perceived_bandit_income: f64,
    mafia_fixed_cost: f64,
    overrides: Overrides,
) -> ProtectionMarket {
    let willingness_to_pay = appropriations;
    let budget = peasant_income.max(0.0);
    let spending = willingness_to_pay.min(budget);
    let price = perceived_peasant_income.max(perceived_bandit_income) + mafia_fixed_cost;
    let demand = if overrides.demand_zero {
        0.0
    } else {
        spending / price
    };
    ProtectionMarket {
        willingness_to_pay,
        budget,
        spending,
        price,
        demand,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MafiaControl {
    /// Mafia size needed to control every bandit.
    pub required: f64,
    pub control: f64,
}

pub fn mafia_control(
    mafia: f64,
    bandits: f64,
    authority_control: f64,
    mafia_effectiveness: f64,
) -> MafiaControl {
    let required = (1.0 - authority_control) * mafia_effectiveness * bandits;
    let control = if required > 0.0 {
        (mafia / required).min(1.0)
    } else if mafia > 0.0 {
        1.0
    } else {
        0.0
    };
    MafiaControl { required, control }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Indices {
    pub lawlessness: f64,
    pub integrity: f64,
}

pub fn indices(
    peasants: f64,
    bandits: f64,
    mafia: f64,
    peasant_income: f64,
    output: f64,
) -> Indices {
    let lawlessness = ((bandits + mafia) / (peasants + bandits + mafia)).clamp(0.0, 1.0);
    let integrity = if output > 0.0 {
        (peasant_income / output).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Indices {
        lawlessness,
        integrity,
    }
}

pub fn evaluate_auxiliaries(
    state: &StockState,
    params: &Parameters,
    overrides: Overrides,
) -> AuxiliaryValues {
    let StockState {
        peasants: p,
        bandits: b,
        mafia: m,
        perceived_peasant_income: ihat_p,
        perceived_bandit_income: ihat_b,
        ..
    } = *state;

    let output = params.marginal_product * p;
    let control = mafia_control(m, b, params.authority_control, params.mafia_effectiveness);
    let theft = theft_success(params.authority_control, control.control);
    let avoidance = avoidance_probability(b, p, params.bandit_technology);
    let appropriations = bandit_appropriations(theft, avoidance, output);
    let bandit = bandit_income(appropriations, control.control, params.max_tribute_share, b);
    // The price only depends on perceived incomes, so it is settled before T_P.
    let price = ihat_p.max(ihat_b) + params.mafia_fixed_cost;
    let peasant = peasant_income(output, appropriations, price, m, p);
    let attractiveness = banditry_attractiveness(ihat_b, ihat_p);
    let potential = potential_bandits(p, b, attractiveness, overrides);
    let market = protection_market(
        appropriations,
        peasant.disposable,
        ihat_p,
        ihat_b,
        params.mafia_fixed_cost,
        overrides,
    );
    let idx = indices(p, b, m, peasant.disposable, output);

    AuxiliaryValues {
        output,
        avoidance,
        theft_success: theft,
        appropriations,
        tribute: bandit.tribute,
        bandit_income: bandit.disposable,
        income_per_bandit: bandit.per_bandit,
        protection_payment: peasant.protection_payment,
        peasant_income: peasant.disposable,
        income_per_peasant: peasant.per_peasant,
        attractiveness,
        potential_bandits: potential,
        willingness_to_pay: market.willingness_to_pay,
        protection_budget: market.budget,
        protection_spending: market.spending,
        protection_price: market.price,
        protection_demand: market.demand,
        required_mafia: control.required,
        mafia_control: control.control,
        lawlessness: idx.lawlessness,
        integrity: idx.integrity,
    }
}

/// Stock derivatives computed from already evaluated auxiliaries.
pub fn derivatives_from(
    state: &StockState,
    aux: &AuxiliaryValues,
    params: &Parameters,
) -> StateDerivative {
    StateDerivative {
        bandits: (aux.potential_bandits - state.bandits) / params.bandit_delay,
        mafia: (aux.protection_demand - state.mafia) / params.mafia_delay,
        perceived_peasant_income: (aux.income_per_peasant - state.perceived_peasant_income)
            / params.perception_delay,
        perceived_bandit_income: (aux.income_per_bandit - state.perceived_bandit_income)
            / params.perception_delay,
    }
}

pub fn derivatives(
    state: &StockState,
    params: &Parameters,
    overrides: Overrides,
) -> StateDerivative {
    let aux = evaluate_auxiliaries(state, params, overrides);
    derivatives_from(state, &aux, params)
}
