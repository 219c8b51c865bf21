//! Built-in algorithms wrapping the core estimators.
//!
//! Peak memory is accounted from the sizes of the structures each estimator
//! holds at once (input copy, embeddings, neighbour indices, bit matrices),
//! not measured from the allocator, so it is exact per task and independent
//! of what other workers are doing.

use gaitnl_core::dfa::{dfa, BoxSizes, DfaParams};
use gaitnl_core::entropy::{
    approximate_entropy, cross_approximate_entropy, multiscale_entropy_plus, permutation_entropy,
    sample_entropy, symbolic_entropy, MultiscaleVariant, Threshold,
};
use gaitnl_core::lyapunov::{lye_rosenstein, lye_wolf, MeanPeriod, RosensteinParams, WolfParams};
use gaitnl_core::numeric::linear_fit;
use gaitnl_core::rqa::{estimate_plot_bytes, quantify, radius_for_rate, Norm, RecurrencePlot, RqaParams};
use gaitnl_core::series::column_series;
use gaitnl_core::statespace::{fnn, self_ami, FnnParams};
use gaitnl_core::{embed, EmbeddingParams};

use crate::error::TaskError;
use crate::params::{AutoParam, ParamDefault, ParamKind, ParamSet, ParamSpec};
use crate::registry::{Algorithm, Artifact, Curve, FitLine, Outcome, TaskInput};

pub fn builtins() -> Vec<Box<dyn Algorithm>> {
    vec![
        Box::new(Ami),
        Box::new(Fnn),
        Box::new(SampEn),
        Box::new(ApEn),
        Box::new(XApEn),
        Box::new(PermEn),
        Box::new(SymbolicEn),
        Box::new(MultiscaleEn),
        Box::new(Dfa),
        Box::new(Rqa),
        Box::new(LyeRosenstein),
        Box::new(LyeWolf),
    ]
}

/// Largest lag scanned when tau is chosen from the AMI curve.
pub fn auto_max_lag(len: usize) -> usize {
    (len.saturating_sub(1) / 2).min(200)
}

const F64: u64 = 8;

fn bytes(n: usize) -> u64 {
    F64 * n as u64
}

fn tau_spec() -> ParamSpec {
    ParamSpec::auto("tau", AutoParam::Tau, "embedding lag")
}

fn dim_spec() -> ParamSpec {
    ParamSpec::auto("dim", AutoParam::Dim, "embedding dimension")
}

fn embedding(p: &ParamSet) -> Result<EmbeddingParams, TaskError> {
    Ok(EmbeddingParams::new(p.usize("tau")?, p.usize("dim")?)?)
}

fn embedded_points(len: usize, p: &ParamSet) -> usize {
    match (p.usize("tau"), p.usize("dim")) {
        (Ok(tau), Ok(dim)) => len.saturating_sub(dim.saturating_sub(1) * tau),
        _ => len,
    }
}

fn sample_rate(input: &TaskInput<'_>, p: &ParamSet) -> Result<Option<f64>, TaskError> {
    Ok(p.opt_f64("sample_rate_hz")?.or(input.series.sample_rate_hz()))
}

fn mean_period(p: &ParamSet) -> Result<MeanPeriod, TaskError> {
    Ok(p.opt_f64("mean_period")?.map_or(MeanPeriod::Auto, MeanPeriod::Samples))
}

fn curve(title: String, x_label: &'static str, y_label: &'static str, x: Vec<f64>) -> Curve {
    Curve { title, x_label, y_label, x, series: Vec::new(), log_log: false, fit: None }
}

fn title(input: &TaskInput<'_>, what: &str) -> String {
    format!("{} {}: {what}", input.dataset.label(), input.series.name())
}

struct Ami;

impl Algorithm for Ami {
    fn name(&self) -> &str {
        "ami"
    }

    fn description(&self) -> &str {
        "average mutual information curve and first-minimum lag"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::optional("max_lag", ParamKind::Int, "largest lag (default min(N/2, 200))"),
            ParamSpec::int("bins", 16, "histogram bins per axis"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let bins = p.usize("bins")?;
        let max_lag = p.opt_usize("max_lag")?.unwrap_or_else(|| auto_max_lag(x.len()));
        let c = self_ami(x, max_lag, bins)?;
        let peak = bytes(x.len()) + 4 * x.len() as u64 + F64 * (bins * bins) as u64 + 2 * bytes(max_lag + 1);
        let mut out = Outcome::new(peak)
            .output("selected_lag", c.selected_lag)
            .output("found_minimum", c.found_minimum)
            .output("ami_at_selected", c.ami[c.selected_lag]);
        if input.want_artifacts {
            let mut cv = curve(title(input, "AMI"), "lag", "AMI (nats)", c.lags.iter().map(|&l| l as f64).collect());
            cv.series.push(("ami".into(), c.ami.iter().map(|&v| Some(v)).collect()));
            out = out.artifact(Artifact::Curve(cv));
        }
        Ok(out)
    }
}

struct Fnn;

impl Algorithm for Fnn {
    fn name(&self) -> &str {
        "fnn"
    }

    fn description(&self) -> &str {
        "false nearest neighbours fraction per dimension"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        let d = FnnParams::default();
        vec![
            tau_spec(),
            ParamSpec::int("max_dim", d.max_dim, "largest dimension tested"),
            ParamSpec::float("r_tol", d.r_tol, "distance-ratio threshold"),
            ParamSpec::float("a_tol", d.a_tol, "attractor-size threshold (std units)"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let params = FnnParams {
            max_dim: p.usize("max_dim")?,
            r_tol: p.f64("r_tol")?,
            a_tol: p.f64("a_tol")?,
            ..FnnParams::default()
        };
        let c = fnn(x, p.usize("tau")?, params)?;
        let peak = bytes(x.len()) + 18 * x.len() as u64 + bytes(params.max_dim);
        let mut out = Outcome::new(peak)
            .output("selected_dim", c.selected_dim)
            .output("converged", c.converged)
            .output("fnn_at_selected", c.fnn_fraction[c.selected_dim - 1]);
        if input.want_artifacts {
            let mut cv = curve(title(input, "FNN"), "dimension", "false fraction", c.dims.iter().map(|&d| d as f64).collect());
            cv.series.push(("fnn_fraction".into(), c.fnn_fraction.iter().map(|&v| Some(v)).collect()));
            out = out.artifact(Artifact::Curve(cv));
        }
        Ok(out)
    }
}

fn m_r_specs() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("m", 2, "template length"),
        ParamSpec::float("r", 0.2, "tolerance as a fraction of the standard deviation"),
    ]
}

struct SampEn;

impl Algorithm for SampEn {
    fn name(&self) -> &str {
        "ent_samp"
    }

    fn description(&self) -> &str {
        "sample entropy"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        m_r_specs()
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let v = sample_entropy(x, p.usize("m")?, p.f64("r")?)?;
        Ok(Outcome::new(bytes(x.len()) + 2 * bytes(x.len())).output("sampen", v))
    }
}

struct ApEn;

impl Algorithm for ApEn {
    fn name(&self) -> &str {
        "ent_ap"
    }

    fn description(&self) -> &str {
        "approximate entropy"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        m_r_specs()
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let v = approximate_entropy(x, p.usize("m")?, p.f64("r")?)?;
        Ok(Outcome::new(bytes(x.len()) + 4 * bytes(x.len())).output("apen", v))
    }
}

struct XApEn;

impl Algorithm for XApEn {
    fn name(&self) -> &str {
        "ent_xap"
    }

    fn description(&self) -> &str {
        "cross-approximate entropy against another column of the same file"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        let mut s = vec![ParamSpec::new("with", ParamKind::Text, ParamDefault::Required, "partner column")];
        s.extend(m_r_specs());
        s
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let other = column_series(input.dataset, p.text("with")?, input.nan_policy)?;
        let y = other.samples();
        let v = cross_approximate_entropy(x, y, p.usize("m")?, p.f64("r")?)?;
        Ok(Outcome::new(bytes(x.len()) + bytes(y.len()) + 4 * bytes(x.len())).output("xapen", v))
    }
}

struct PermEn;

impl Algorithm for PermEn {
    fn name(&self) -> &str {
        "ent_permu"
    }

    fn description(&self) -> &str {
        "permutation entropy"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::int("m", 3, "pattern order (2..=7)"),
            ParamSpec::int("tau", 1, "spacing inside a pattern"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let m = p.usize("m")?;
        let pe = permutation_entropy(x, m, p.usize("tau")?)?;
        let patterns: usize = (1..=m.min(7)).product();
        Ok(Outcome::new(bytes(x.len()) + bytes(x.len()) + bytes(patterns))
            .output("pe", pe.raw)
            .output("pe_normalized", pe.normalized))
    }
}

struct SymbolicEn;

impl Algorithm for SymbolicEn {
    fn name(&self) -> &str {
        "ent_symbolic"
    }

    fn description(&self) -> &str {
        "normalised corrected Shannon entropy of binary words"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::int("word_length", 3, "bits per word"),
            ParamSpec::optional("threshold", ParamKind::Float, "binarisation threshold (default: median)"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let l = p.usize("word_length")?;
        let thr = p.opt_f64("threshold")?.map_or(Threshold::AutoMedian, Threshold::Value);
        let v = symbolic_entropy(x, thr, l)?;
        let words = x.len().min(1usize << l.min(32));
        Ok(Outcome::new(2 * bytes(x.len()) + 48 * words as u64).output("symbolic_entropy", v))
    }
}

struct MultiscaleEn;

impl Algorithm for MultiscaleEn {
    fn name(&self) -> &str {
        "ent_ms_plus"
    }

    fn description(&self) -> &str {
        "multiscale entropy curves (rcmse, cmse, mse, msfe, gmse)"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        let mut s = m_r_specs();
        s.push(ParamSpec::int("max_scale", 20, "largest coarse-graining scale"));
        s.push(ParamSpec::text("variants", "rcmse", "comma-separated variants or 'all'"));
        s
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let spec = p.text("variants")?;
        let variants: Vec<MultiscaleVariant> = if spec.eq_ignore_ascii_case("all") {
            MultiscaleVariant::ALL.to_vec()
        } else {
            spec.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?
        };
        let max_scale = p.usize("max_scale")?;
        let curves = multiscale_entropy_plus(x, p.usize("m")?, p.f64("r")?, max_scale, &variants)?;
        let peak = 4 * bytes(x.len()) + bytes(curves.len() * max_scale);
        let mut out = Outcome::new(peak);
        for c in &curves {
            let list: Vec<String> = c
                .values
                .iter()
                .map(|v| v.map_or_else(|| "undefined".into(), |v| v.to_string()))
                .collect();
            let defined: Vec<f64> = c.values.iter().flatten().copied().collect();
            out = out
                .output(c.variant.as_str(), list.join(","))
                .output(format!("{}_complexity_index", c.variant.as_str()), defined.iter().sum::<f64>());
        }
        if input.want_artifacts {
            let scales = (1..=max_scale).map(|s| s as f64).collect();
            let mut cv = curve(title(input, "multiscale entropy"), "scale", "entropy", scales);
            for c in curves {
                cv.series.push((c.variant.as_str().to_string(), c.values));
            }
            out = out.artifact(Artifact::Curve(cv));
        }
        Ok(out)
    }
}

struct Dfa;

impl Algorithm for Dfa {
    fn name(&self) -> &str {
        "dfa"
    }

    fn description(&self) -> &str {
        "detrended fluctuation analysis scaling exponent"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            ParamSpec::int("order", 1, "detrending polynomial degree"),
            ParamSpec::optional("fit_min", ParamKind::Int, "smallest box size in the fit"),
            ParamSpec::optional("fit_max", ParamKind::Int, "largest box size in the fit"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let fit_range = match (p.opt_usize("fit_min")?, p.opt_usize("fit_max")?) {
            (None, None) => None,
            (lo, hi) => Some((lo.unwrap_or(0), hi.unwrap_or(usize::MAX))),
        };
        let params = DfaParams { box_sizes: BoxSizes::Auto, order: p.usize("order")?, fit_range };
        let r = dfa(x, &params)?;
        let largest = r.box_sizes.last().copied().unwrap_or(0);
        let peak = 2 * bytes(x.len()) + bytes((params.order + 1) * largest) + 2 * bytes(r.box_sizes.len());
        let mut out = Outcome::new(peak)
            .output("alpha", r.alpha)
            .output("fit_r2", r.fit_r2)
            .output("fit_min", r.fit_range.0)
            .output("fit_max", r.fit_range.1)
            .output("boxes", r.box_sizes.len());
        if input.want_artifacts {
            let (lx, ly): (Vec<f64>, Vec<f64>) = r
                .box_sizes
                .iter()
                .zip(&r.fluctuations)
                .filter(|(n, _)| (r.fit_range.0..=r.fit_range.1).contains(n))
                .map(|(&n, &f)| ((n as f64).log10(), f.log10()))
                .unzip();
            let (slope, intercept, _) = linear_fit(&lx, &ly);
            let from = lx.first().copied().unwrap_or(0.0);
            let to = lx.last().copied().unwrap_or(0.0);
            let mut cv = curve(title(input, "DFA"), "box size", "F(n)", r.box_sizes.iter().map(|&n| n as f64).collect());
            cv.series.push(("fluctuation".into(), r.fluctuations.iter().map(|&v| Some(v)).collect()));
            cv.log_log = true;
            cv.fit = Some(FitLine { slope, intercept, from, to });
            out = out.artifact(Artifact::Curve(cv));
        }
        Ok(out)
    }
}

struct Rqa;

impl Rqa {
    fn weighted(p: &ParamSet) -> bool {
        p.bool("weighted_entropy").unwrap_or(true)
    }
}

impl Algorithm for Rqa {
    fn name(&self) -> &str {
        "rqa"
    }

    fn description(&self) -> &str {
        "recurrence quantification on a bit-packed recurrence plot"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            tau_spec(),
            dim_spec(),
            ParamSpec::optional("radius", ParamKind::Float, "recurrence radius (default: searched from rec_target)"),
            ParamSpec::float("rec_target", 5.0, "target recurrence rate in percent when radius is unset"),
            ParamSpec::float("rec_tolerance", 0.01, "accepted deviation from rec_target, percentage points"),
            ParamSpec::text("norm", "euclidean", "euclidean, chebyshev or manhattan"),
            ParamSpec::int("theiler", 0, "Theiler window"),
            ParamSpec::int("l_min", 2, "shortest diagonal line"),
            ParamSpec::int("v_min", 2, "shortest vertical line"),
            ParamSpec::boolean("weighted_entropy", true, "compute the weighted recurrence entropy"),
        ]
    }

    fn estimate_bytes(&self, len: usize, p: &ParamSet) -> Option<u64> {
        let points = embedded_points(len, p);
        let dim = p.usize("dim").unwrap_or(1);
        Some(bytes(len) + estimate_plot_bytes(points, dim, Self::weighted(p)))
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let points = embed(x, embedding(p)?)?;
        let norm: Norm = p.text("norm")?.parse()?;
        let theiler = p.usize("theiler")?;
        let (radius, iterations) = match p.opt_f64("radius")? {
            Some(r) => (r, None),
            None => {
                let s = radius_for_rate(&points, p.f64("rec_target")?, norm, theiler, p.f64("rec_tolerance")?)?;
                (s.radius, Some(s.iterations))
            }
        };
        let params = RqaParams {
            radius,
            norm,
            theiler,
            l_min: p.usize("l_min")?,
            v_min: p.usize("v_min")?,
            weighted_entropy: Self::weighted(p),
        };
        let plot = RecurrencePlot::build(&points, &params, None)?;
        let m = quantify(&plot, params.l_min, params.v_min);
        let peak = self.estimate_bytes(x.len(), p).unwrap_or(0);
        let mut out = Outcome::new(peak)
            .output("radius", radius)
            .output("recurrence_rate_pct", m.recurrence_rate_pct)
            .output("determinism_pct", m.determinism_pct)
            .output("max_diagonal_line", m.max_diagonal_line)
            .output("mean_diagonal_line", m.mean_diagonal_line)
            .output("diagonal_entropy", m.diagonal_entropy)
            .output("laminarity_pct", m.laminarity_pct)
            .output("trapping_time", m.trapping_time)
            .output("max_vertical_line", m.max_vertical_line)
            .output("weighted_recurrence_entropy", m.weighted_recurrence_entropy);
        if let Some(it) = iterations {
            out = out.output("radius_search_iterations", it);
        }
        if input.want_artifacts {
            out = out.artifact(Artifact::Recurrence(plot));
        }
        Ok(out)
    }
}

struct LyeRosenstein;

impl Algorithm for LyeRosenstein {
    fn name(&self) -> &str {
        "lye_r"
    }

    fn description(&self) -> &str {
        "Lyapunov exponents from Rosenstein's divergence curve"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            tau_spec(),
            dim_spec(),
            ParamSpec::optional("mean_period", ParamKind::Float, "temporal exclusion in samples (default: spectral)"),
            ParamSpec::optional("max_steps", ParamKind::Int, "divergence curve length (default: 10 mean periods)"),
            ParamSpec::optional("sample_rate_hz", ParamKind::Float, "report exponents per second"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let emb = embedding(p)?;
        let params = RosensteinParams {
            embedding: emb,
            mean_period: mean_period(p)?,
            max_steps: p.opt_usize("max_steps")?,
            sample_rate_hz: sample_rate(input, p)?,
        };
        let r = lye_rosenstein(x, &params)?;
        let m = emb.points(x.len());
        let peak = bytes(x.len()) + bytes(m * emb.dim) + 3 * bytes(m) + bytes(r.divergence.len());
        let w = r.fit_windows;
        let mut out = Outcome::new(peak)
            .output("mean_period", r.mean_period)
            .output("short_exp", r.short_exp)
            .output("local_exp", r.local_exp)
            .output("long_exp", r.long_exp)
            .output("orbital_exp", r.orbital_exp)
            .output("steps", r.divergence.len());
        for (name, (a, b)) in ["short", "local", "long", "orbital"].iter().zip(w) {
            out = out.output(format!("window_{name}"), format!("{a}-{b}"));
        }
        if input.want_artifacts {
            let steps = (0..r.divergence.len()).map(|k| k as f64).collect();
            let mut cv = curve(title(input, "mean log divergence"), "step", "<ln d>", steps);
            cv.series.push(("divergence".into(), r.divergence.iter().map(|&v| Some(v)).collect()));
            out = out.artifact(Artifact::Curve(cv));
        }
        Ok(out)
    }
}

struct LyeWolf;

impl Algorithm for LyeWolf {
    fn name(&self) -> &str {
        "lye_w"
    }

    fn description(&self) -> &str {
        "largest Lyapunov exponent by Wolf's trajectory evolution"
    }

    fn schema(&self) -> Vec<ParamSpec> {
        vec![
            tau_spec(),
            dim_spec(),
            ParamSpec::int("evolve_steps", 3, "steps between renormalisations"),
            ParamSpec::float("scale_min", 0.01, "smallest separation, fraction of the range"),
            ParamSpec::float("scale_max", 0.1, "replacement threshold, fraction of the range"),
            ParamSpec::optional("mean_period", ParamKind::Float, "temporal exclusion in samples (default: spectral)"),
            ParamSpec::optional("sample_rate_hz", ParamKind::Float, "report the exponent per second"),
        ]
    }

    fn run(&self, input: &TaskInput<'_>, p: &ParamSet) -> Result<Outcome, TaskError> {
        let x = input.series.samples();
        let emb = embedding(p)?;
        let params = WolfParams {
            embedding: emb,
            evolve_steps: p.usize("evolve_steps")?,
            scale_min: p.f64("scale_min")?,
            scale_max: p.f64("scale_max")?,
            mean_period: mean_period(p)?,
            sample_rate_hz: sample_rate(input, p)?,
        };
        let r = lye_wolf(x, &params)?;
        let m = emb.points(x.len());
        let peak = bytes(x.len()) + 2 * bytes(m);
        Ok(Outcome::new(peak)
            .output("largest_exponent", r.largest_exponent)
            .output("replacements", r.replacements)
            .output("evolution_steps", r.evolution_steps))
    }
}
