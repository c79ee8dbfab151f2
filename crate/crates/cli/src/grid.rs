//! `start:stop:step` grids.

use std::str::FromStr;

const MAX_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    /// Grid values `start + i·step` up to and including `stop`.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.start + i as f64 * self.step).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> Result<f64, String> {
            let v: f64 = t.trim().parse().map_err(|_| format!("'{t}' is not a number"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("'{t}' is not finite"))
            }
        };
        let grid = match parts.as_slice() {
            [single] => {
                let v = num(single)?;
                Grid {
                    start: v,
                    stop: v,
                    step: 1.0,
                }
            }
            [a, b, step] => Grid {
                start: num(a)?,
                stop: num(b)?,
                step: num(step)?,
            },
            _ => return Err(format!("expected start:stop:step, got '{s}'")),
        };
        if !(grid.step > 0.0) {
            return Err(format!("step must be positive, got {}", grid.step));
        }
        if grid.stop < grid.start {
            return Err(format!("stop {} is below start {}", grid.stop, grid.start));
        }
        if (grid.stop - grid.start) / grid.step >= MAX_POINTS as f64 {
            return Err(format!("grid has more than {MAX_POINTS} points"));
        }
        Ok(grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_stop() {
        let g: Grid = "0:1:0.1".parse().unwrap();
        let v = g.values();
        assert_eq!(v.len(), 11);
        assert!((v[10] - 1.0).abs() < 1e-12);
        assert_eq!("2".parse::<Grid>().unwrap().values(), vec![2.0]);
        assert_eq!("0:20:5".parse::<Grid>().unwrap().values(), vec![0.0, 5.0, 10.0, 15.0, 20.0]);
    }

    #[test]
    fn malformed() {
        for bad in ["", "1:2", "1:2:0", "2:1:1", "a:b:c", "1:2:-1", "0:1e9:1e-3"] {
            assert!(bad.parse::<Grid>().is_err(), "{bad}");
        }
    }
}
