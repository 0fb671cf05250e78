//! Train / nested-validation / test boundaries.

use serde::{Deserialize, Serialize};

use crate::data::Month;
use crate::error::{Error, Result};

/// Sample boundaries as exclusive row indices into the prepared panel:
/// training covers `[0, train_end)`, the three nested validation windows all
/// start at `train_end` and end at `validation_ends[i]`, and the test sample
/// covers `[validation_ends[2], test_end)`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSplits {
    pub train_end: usize,
    pub validation_ends: [usize; 3],
    pub test_end: usize,
}

impl SampleSplits {
    pub fn validate(&self) -> Result<()> {
        let b = [
            self.train_end,
            self.validation_ends[0],
            self.validation_ends[1],
            self.validation_ends[2],
            self.test_end,
        ];
        if self.train_end == 0 {
            return Err(Error::validation("empty training sample".to_string()));
        }
        for w in b.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::validation(format!(
                    "split boundaries must be strictly increasing, got {b:?}"
                )));
            }
        }
        Ok(())
    }

    /// End of the full in-sample window (training + validation); the
    /// normalizer is fitted on `[0, in_sample_end)`.
    pub fn in_sample_end(&self) -> usize {
        self.validation_ends[2]
    }

    pub fn test_start(&self) -> usize {
        self.validation_ends[2]
    }

    /// Out-of-sample size P.
    pub fn test_len(&self) -> usize {
        self.test_end - self.test_start()
    }
}

/// Split specification from the run config: explicit calendar dates, or
/// fractions of the sample for non-calendar data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum SplitSpec {
    /// `train_end` is the last training month; the three validation windows
    /// end at `validation_ends` and the test window at `test_end` (all
    /// inclusive month labels).
    Dates {
        train_end: Month,
        validation_ends: [Month; 3],
        test_end: Month,
    },
    /// Fractions of the panel assigned to train / validation / test; the
    /// validation span is cut into three nested windows at 1/3, 2/3 and 3/3
    /// of its length.
    Fractions { train: f64, validation: f64, test: f64 },
}

impl SplitSpec {
    /// The paper's calendar: training through 1993M04, validation windows
    /// 1993M05..{1997M10, 2002M03, 2006M07}, test 2006M08..2019M10.
    pub fn fred_md_default() -> Self {
        SplitSpec::Dates {
            train_end: Month::new(1993, 4).unwrap(),
            validation_ends: [
                Month::new(1997, 10).unwrap(),
                Month::new(2002, 3).unwrap(),
                Month::new(2006, 7).unwrap(),
            ],
            test_end: Month::new(2019, 10).unwrap(),
        }
    }

    pub fn resolve(&self, dates: &[Month]) -> Result<SampleSplits> {
        let t = dates.len();
        let splits = match self {
            SplitSpec::Dates {
                train_end,
                validation_ends,
                test_end,
            } => {
                let first = *dates.first().ok_or_else(|| {
                    Error::validation("cannot split an empty panel".to_string())
                })?;
                let last = *dates.last().unwrap();
                let index_after = |m: Month, what: &str| -> Result<usize> {
                    if m < first || m > last {
                        return Err(Error::validation(format!(
                            "{what} {m} outside panel range {first}..{last}"
                        )));
                    }
                    Ok(m.months_since(first) as usize + 1)
                };
                SampleSplits {
                    train_end: index_after(*train_end, "train end")?,
                    validation_ends: [
                        index_after(validation_ends[0], "validation end")?,
                        index_after(validation_ends[1], "validation end")?,
                        index_after(validation_ends[2], "validation end")?,
                    ],
                    test_end: index_after(*test_end, "test end")?,
                }
            }
            SplitSpec::Fractions {
                train,
                validation,
                test,
            } => {
                let total = train + validation + test;
                if !(total.is_finite() && (total - 1.0).abs() < 1e-9) {
                    return Err(Error::validation(format!(
                        "split fractions must sum to 1, got {total}"
                    )));
                }
                let train_end = (train * t as f64).round() as usize;
                let val_end = ((train + validation) * t as f64).round() as usize;
                let span = val_end.saturating_sub(train_end);
                SampleSplits {
                    train_end,
                    validation_ends: [
                        train_end + span.div_ceil(3),
                        train_end + (2 * span).div_ceil(3),
                        val_end,
                    ],
                    test_end: t,
                }
            }
        };
        if splits.test_end > t {
            return Err(Error::validation(format!(
                "split end {} beyond panel length {t}",
                splits.test_end
            )));
        }
        splits.validate()?;
        Ok(splits)
    }
}
