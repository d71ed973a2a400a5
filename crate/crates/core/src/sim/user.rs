use crate::attention_model::AttentionModel;
use crate::error::{Error, Result};

/// Order in which a simulated user is assumed to look through results,
/// used for the discovery counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExaminationOrder {
    /// By list rank; items without one come last.
    ByRank,
    /// By raw attention, highest first, ties by id.
    ByAttentionDesc,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UserModel {
    pub attention: AttentionModel,
    /// Click probability for an item with relative attention 1.
    pub click_propensity: f64,
    pub order: ExaminationOrder,
}

impl UserModel {
    /// List users examine by rank, map users by attention.
    pub fn new(attention: AttentionModel, click_propensity: f64) -> Result<Self> {
        let order = if attention.is_map() {
            ExaminationOrder::ByAttentionDesc
        } else {
            ExaminationOrder::ByRank
        };
        let user = Self {
            attention,
            click_propensity,
            order,
        };
        user.validate()?;
        Ok(user)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.click_propensity > 0.0 && self.click_propensity <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "click propensity {} outside (0, 1]",
                self.click_propensity
            )));
        }
        Ok(())
    }
}
