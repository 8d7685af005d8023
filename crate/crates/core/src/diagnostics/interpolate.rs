use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::ParamVector;

/// Piecewise-linear path through the iterates with knot times
/// `λ_0 = 0`, `λ_{i+1} = λ_i + η_i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolatedPath {
    pub times: Vec<f64>,
    pub points: Vec<ParamVector>,
}

/// Builds the interpolated process of `xs = [x_0, …, x_K]` under step sizes
/// `etas = [η_0, …, η_{K−1}]`.
pub fn interpolated_process(etas: &[f64], xs: &[ParamVector]) -> Result<InterpolatedPath> {
    if xs.len() != etas.len() + 1 {
        return Err(Error::contract(format!(
            "need one more iterate than step sizes, got {} and {}",
            xs.len(),
            etas.len()
        )));
    }
    let mut times = Vec::with_capacity(xs.len());
    let mut t = 0.0;
    times.push(t);
    for (i, &eta) in etas.iter().enumerate() {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::contract(format!(
                "step size {i} is {eta}, must be positive"
            )));
        }
        t += eta;
        times.push(t);
    }
    Ok(InterpolatedPath {
        times,
        points: xs.to_vec(),
    })
}

impl InterpolatedPath {
    pub fn total_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// `w(λ_i + s) = x_i + (s / η_i)(x_{i+1} − x_i)`; exact at every knot.
    pub fn evaluate(&self, t: f64) -> Result<ParamVector> {
        let end = self.total_time();
        if !(0.0..=end).contains(&t) {
            return Err(Error::contract(format!("time {t} outside [0, {end}]")));
        }
        // last knot with λ_i ≤ t
        let i = self.times.partition_point(|&l| l <= t) - 1;
        if i + 1 == self.times.len() || self.times[i] == t {
            return Ok(self.points[i].clone());
        }
        let frac = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        let (a, b) = (&self.points[i], &self.points[i + 1]);
        Ok(ParamVector::new(
            a.iter()
                .zip(b.iter())
                .map(|(ai, bi)| ai + frac * (bi - ai))
                .collect(),
        ))
    }

    /// CSV with header `lambda,x_0,…,x_{n−1}`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let dim = self.points.first().map(ParamVector::dim).unwrap_or(0);
        let mut header = String::from("lambda");
        for j in 0..dim {
            header.push_str(&format!(",x_{j}"));
        }
        writeln!(out, "{header}")?;
        for (t, x) in self.times.iter().zip(&self.points) {
            write!(out, "{t}")?;
            for v in x.iter() {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[f64]) -> Vec<ParamVector> {
        v.iter()
            .map(|&x| ParamVector::new(vec![x, 2.0 * x]))
            .collect()
    }

    #[test]
    fn cumulative_times() {
        let p = interpolated_process(&[0.5, 0.25], &pts(&[0.0, 1.0, 3.0])).unwrap();
        assert_eq!(p.times, vec![0.0, 0.5, 0.75]);
        assert_eq!(p.total_time(), 0.75);
    }

    #[test]
    fn knots_are_exact_and_midpoints_average() {
        let xs = pts(&[0.0, 1.0, 3.0]);
        let p = interpolated_process(&[0.5, 0.25], &xs).unwrap();
        for (t, x) in p.times.iter().zip(&xs) {
            assert_eq!(&p.evaluate(*t).unwrap(), x);
        }
        assert_eq!(p.evaluate(0.625).unwrap(), ParamVector::new(vec![2.0, 4.0]));
        assert_eq!(p.evaluate(0.25).unwrap(), ParamVector::new(vec![0.5, 1.0]));
        assert!(p.evaluate(0.8).is_err());
    }

    #[test]
    fn nonpositive_step_rejected() {
        assert!(interpolated_process(&[0.5, 0.0], &pts(&[0.0, 1.0, 3.0])).is_err());
        assert!(interpolated_process(&[0.5], &pts(&[0.0, 1.0, 3.0])).is_err());
    }

    #[test]
    fn csv_layout() {
        let p = interpolated_process(&[0.5], &pts(&[0.0, 1.0])).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "lambda,x_0,x_1\n0,0,0\n0.5,1,2\n"
        );
    }
}
