//! Acceptance suite: one pass/fail line per criterion, non-zero exit on any failure.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, Normal};
use tdd_core::classify::{
    evaluate, gradient, objective, run_topic_experiment, LinearKind, ModelKind,
};
use tdd_core::cluster::{
    fast_ica, hac, kmeans, pearson, HacConfig, IcaConfig, KMeansConfig, Linkage,
};
use tdd_core::corpus::{Corpus, LabelKind, LabeledDataset};
use tdd_core::distributions::{
    kl_divergence, kl_tdc, normalize, report, softmax, KlTdcOptions, NormalizationMode,
    ProbabilityVector,
};
use tdd_core::features::{FeatureMatrix, Vocabulary};
use tdd_core::generate::fit_markov;
use tdd_core::seed::{derive_seed, rng};
use tdd_core::synth::{
    keyword_topic_corpus, token_names, total_variation, zipf_weights, Categorical,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn relative() -> NormalizationMode {
    NormalizationMode::Relative
}

/// Random corpus: 1-40 documents of 1-20 tokens over a vocabulary of 1-300 words.
fn random_corpus(seed: u64) -> Corpus {
    let mut r = rng(seed);
    let vocab = r.random_range(1..=300);
    let texts: Vec<String> = (0..r.random_range(1..=40))
        .map(|_| {
            (0..r.random_range(1..=20))
                .map(|_| format!("tok{}", r.random_range(0..vocab)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    Corpus::from_texts("random", &texts)
}

fn c1_identity() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let c = random_corpus(seed);
        let distinct = c
            .texts()
            .flat_map(|t| t.split(' '))
            .collect::<HashSet<_>>()
            .len();
        let softmax_opts = KlTdcOptions {
            k: Some(distinct.min(100)),
            ..KlTdcOptions::default()
        };
        for opts in [softmax_opts, KlTdcOptions::full_vocab(relative(), 1.0)] {
            let kl = kl_tdc(&c, &c, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(kl.abs());
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= 1e-12 && elapsed <= Duration::from_secs(1),
        format!("max |kl| = {worst:e} over 50 corpora x 2 modes in {elapsed:.2?}"),
    )
}

fn random_distribution<R: Rng>(r: &mut R, n: usize, allow_zeros: bool) -> ProbabilityVector {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            if allow_zeros && r.random::<f64>() < 0.2 {
                0.0
            } else {
                -r.random::<f64>().max(f64::MIN_POSITIVE).ln()
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        return ProbabilityVector::new(p).unwrap();
    }
    ProbabilityVector::new(raw.iter().map(|x| x / total).collect()).unwrap()
}

fn c2_gibbs() -> Outcome {
    let mut r = rng(2);
    let mut min_kl = f64::INFINITY;
    let mut witness = None;
    for i in 0..10_000 {
        let n = r.random_range(2..=200);
        let p = random_distribution(&mut r, n, i % 5 == 0);
        let q = random_distribution(&mut r, n, false);
        let pq = kl_divergence(&p, &q).map_err(|e| e.to_string())?;
        min_kl = min_kl.min(pq);
        if witness.is_none() && i % 5 != 0 {
            let qp = kl_divergence(&q, &p).map_err(|e| e.to_string())?;
            if (pq - qp).abs() > 1e-6 {
                witness = Some((n, pq, qp));
            }
        }
    }
    let detail = format!("min KL = {min_kl:e} over 10000 pairs; asymmetric witness {witness:?}");
    check(min_kl >= 0.0 && witness.is_some(), detail)
}

/// Direct summation over the top-k original tokens, without log-space tricks.
fn oracle(orig: &[u64], cand: &[u64], k: usize, mode: NormalizationMode) -> f64 {
    let mut order: Vec<usize> = (0..orig.len()).filter(|&i| orig[i] > 0).collect();
    // Token names t0..t5 sort like their indices.
    order.sort_by(|&a, &b| orig[b].cmp(&orig[a]).then(a.cmp(&b)));
    order.truncate(k);
    let weights = |counts: &[u64]| -> Vec<f64> {
        let w: Vec<f64> = order
            .iter()
            .map(|&i| match mode {
                NormalizationMode::Softmax => (counts[i] as f64).exp(),
                NormalizationMode::Relative => counts[i] as f64 + 1.0,
            })
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    };
    let (p, q) = (weights(orig), weights(cand));
    p.iter().zip(&q).map(|(p, q)| p * (p / q).ln()).sum()
}

fn corpus_from_counts(name: &str, counts: &[u64]) -> Corpus {
    let tokens: Vec<String> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(format!("t{i}"), c as usize))
        .collect();
    // Two documents, so token counts are summed across documents.
    let mid = tokens.len() / 2;
    let texts: Vec<String> = [&tokens[..mid], &tokens[mid..]]
        .iter()
        .filter(|half| !half.is_empty())
        .map(|half| half.join(" "))
        .collect();
    Corpus::from_texts(name, &texts)
}

fn decode(mut index: u64, v: usize) -> Vec<u64> {
    (0..v)
        .map(|_| {
            let d = index % 6;
            index /= 6;
            d
        })
        .collect()
}

fn c3_oracle() -> Outcome {
    // Cases per vocabulary size: exhaustive for 1 and 2 tokens, evenly strided beyond.
    let budget = [25u64, 1225, 2187, 2187, 2188, 2188];
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for (v, &want) in (1..=6).zip(&budget) {
        let vectors = 6u64.pow(v as u32) - 1;
        let total = vectors * vectors;
        let stride = if want >= total { 1 } else { (total / want) | 1 };
        for step in 0..want.min(total) {
            let idx = step * stride % total;
            let orig = decode(idx / vectors + 1, v);
            let cand = decode(idx % vectors + 1, v);
            let distinct = orig.iter().filter(|&&c| c > 0).count();
            let ks = [distinct, 1 + (idx as usize % distinct)];
            let (o, c) = (
                corpus_from_counts("o", &orig),
                corpus_from_counts("c", &cand),
            );
            for mode in [NormalizationMode::Softmax, relative()] {
                for &k in &ks {
                    let opts = KlTdcOptions {
                        k: Some(k),
                        mode,
                        ..KlTdcOptions::default()
                    };
                    let got =
                        kl_tdc(&o, &c, &opts).map_err(|e| format!("{orig:?} {cand:?}: {e}"))?;
                    let diff = (got - oracle(&orig, &cand, k, mode)).abs();
                    if diff > worst {
                        worst = diff;
                    }
                }
            }
            cases += 1;
        }
    }
    check(
        cases == 10_000 && worst <= 1e-12,
        format!("{cases} corpus pairs x 2 modes x 2 k values, max |diff| = {worst:e}"),
    )
}

fn c4_protocol() -> Outcome {
    let start = Instant::now();
    let tokens = token_names(50);
    let wa = zipf_weights(50, 1.0);
    let wb: Vec<f64> = wa.iter().rev().copied().collect();
    let tv = total_variation(&wa, &wb);
    let ga = Categorical::new(tokens.clone(), &wa);
    let gb = Categorical::new(tokens, &wb);
    let modes = [
        ("relative", KlTdcOptions::full_vocab(relative(), 1.0)),
        (
            "softmax",
            KlTdcOptions::full_vocab(NormalizationMode::Softmax, 1.0),
        ),
    ];
    let mut kl_wins = [0; 2];
    let mut bg_wins = [0; 2];
    for seed in 0..100u64 {
        let a = ga.corpus("a", 5000, 10, derive_seed(seed, "a"));
        let holdout = ga.corpus("a_holdout", 5000, 10, derive_seed(seed, "holdout"));
        let b = gb.corpus("b", 5000, 10, derive_seed(seed, "b"));
        for (m, (_, opts)) in modes.iter().enumerate() {
            let same = report("same", &a, &holdout, 0.1, opts, seed).map_err(|e| e.to_string())?;
            let cross = report("cross", &a, &b, 0.1, opts, seed).map_err(|e| e.to_string())?;
            kl_wins[m] += usize::from(same.generated_score < cross.generated_score);
            bg_wins[m] += usize::from(same.bg_ratio > cross.bg_ratio);
        }
    }
    let elapsed = start.elapsed();
    let detail = format!(
        "TV = {tv:.3}; KL order {}/100 relative, {}/100 softmax; B:G order {}/100 relative, {}/100 softmax; {elapsed:.1?}",
        kl_wins[0], kl_wins[1], bg_wins[0], bg_wins[1]
    );
    check(
        tv >= 0.3
            && kl_wins.iter().all(|&w| w >= 95)
            && bg_wins.iter().all(|&w| w >= 95)
            && elapsed <= Duration::from_secs(60),
        detail,
    )
}

fn analytic_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(p, q)| p * (p / q).ln()).sum()
}

fn tilted(p: &[f64], t: f64) -> Vec<f64> {
    let n = p.len() as f64;
    let w: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(i, p)| p * (t * i as f64 / n).exp())
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn c5_relative() -> Outcome {
    let tokens = token_names(50);
    let p = zipf_weights(50, 1.0);
    // Bisection on the tilt so that KL(p || q) = 0.25.
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if analytic_kl(&p, &tilted(&p, mid)) < 0.25 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q = tilted(&p, 0.5 * (lo + hi));
    let target = analytic_kl(&p, &q);
    let gp = Categorical::new(tokens.clone(), &p);
    let gq = Categorical::new(tokens, &q);
    let opts = KlTdcOptions::full_vocab(relative(), 1.0);
    let original = gp.corpus("o", 5000, 20, 51);
    let same =
        kl_tdc(&original, &gp.corpus("s", 5000, 20, 52), &opts).map_err(|e| e.to_string())?;
    let shifted =
        kl_tdc(&original, &gq.corpus("q", 5000, 20, 53), &opts).map_err(|e| e.to_string())?;
    check(
        same <= 0.01 && (0.20..=0.30).contains(&shifted),
        format!("same generator {same:.5}; analytic {target:.4} measured {shifted:.4}"),
    )
}

fn c6_softmax() -> Outcome {
    let mut r = rng(6);
    let mut worst_sum: f64 = 0.0;
    let mut worst_shift: f64 = 0.0;
    for _ in 0..1000 {
        let n = r.random_range(1..=50);
        let x: Vec<f64> = (0..n).map(|_| r.random_range(-50.0..50.0)).collect();
        let c = r.random_range(-100.0..100.0);
        let p = softmax(&x);
        let shifted = softmax(&x.iter().map(|v| v + c).collect::<Vec<_>>());
        worst_sum = worst_sum.max((p.probs().iter().sum::<f64>() - 1.0).abs());
        for (a, b) in p.probs().iter().zip(shifted.probs()) {
            worst_shift = worst_shift.max((a - b).abs());
        }
    }
    let half = normalize(&[0, 0], NormalizationMode::Softmax, 1.0).map_err(|e| e.to_string())?;
    let one = normalize(&[1, 0], NormalizationMode::Softmax, 1.0).map_err(|e| e.to_string())?;
    let ok = worst_sum <= 1e-9
        && worst_shift <= 1e-9
        && half.probs() == [0.5, 0.5]
        && (one.probs()[0] - 0.73106).abs() <= 1e-5
        && (one.probs()[1] - 0.26894).abs() <= 1e-5;
    check(
        ok,
        format!(
            "sum err {worst_sum:e}, shift err {worst_shift:e}, (0,0) -> {:?}, (1,0) -> ({:.5}, {:.5})",
            half.probs(),
            one.probs()[0],
            one.probs()[1]
        ),
    )
}

fn c7_classifiers() -> Outcome {
    let docs = keyword_topic_corpus(2000, [("M", "market"), ("V", "vaccine")], 200, 10, 7);
    let ds = LabeledDataset::new(docs, LabelKind::Topic).map_err(|e| e.to_string())?;
    let mut lines = Vec::new();
    let mut ok = true;
    for model in ModelKind::ALL {
        let with = run_topic_experiment(&ds, true, model, 7).map_err(|e| e.to_string())?;
        let without = run_topic_experiment(&ds, false, model, 7).map_err(|e| e.to_string())?;
        let (a, b) = (with.report.accuracy, without.report.accuracy);
        ok &= a >= 0.95 && b < 0.70;
        lines.push(format!("{} {a:.3} -> {b:.3}", model.name()));
    }

    // Gradient check at initialization: zero weights, bias at the prior log-odds.
    let vocab = Arc::new(Vocabulary::from_tokens(
        ds.docs()
            .iter()
            .flat_map(|d| d.text.split(' ').map(str::to_string))
            .collect::<Vec<_>>(),
    ));
    let texts: Vec<&str> = ds.docs().iter().map(|d| d.text.as_str()).collect();
    let x = FeatureMatrix::counts(texts, vocab);
    let y: Vec<usize> = ds.labels().iter().map(|l| usize::from(*l == "V")).collect();
    let pos = y.iter().filter(|&&l| l == 1).count() as f64;
    let bias = (pos / (y.len() as f64 - pos)).ln();
    let l2 = 1e-4;
    let mut w = vec![0.0; x.n_features()];
    let all: Vec<usize> = (0..y.len()).collect();
    let (gw, gb) = gradient(LinearKind::Logreg, &x.rows, &y, &all, &w, bias, l2);
    let h = 1e-5;
    let f = |w: &[f64], b: f64| objective(LinearKind::Logreg, &x.rows, &y, w, b, l2);
    let mut diff2 = 0.0;
    let mut norm2 = 0.0;
    for j in 0..w.len() {
        let orig = w[j];
        w[j] = orig + h;
        let up = f(&w, bias);
        w[j] = orig - h;
        let down = f(&w, bias);
        w[j] = orig;
        let fd = (up - down) / (2.0 * h);
        diff2 += (fd - gw[j]).powi(2);
        norm2 += gw[j].powi(2);
    }
    let fd_b = (f(&w, bias + h) - f(&w, bias - h)) / (2.0 * h);
    diff2 += (fd_b - gb).powi(2);
    norm2 += gb.powi(2);
    let rel = (diff2 / norm2).sqrt();
    ok &= rel <= 1e-4;
    lines.push(format!(
        "gradient rel err {rel:.2e} over {} coords",
        w.len() + 1
    ));
    check(ok, lines.join("; "))
}

fn c8_report() -> Outcome {
    let mut y_true = Vec::new();
    let mut y_pred = Vec::new();
    for (t, p, n) in [(0, 0, 584), (0, 1, 12), (1, 0, 11), (1, 1, 1780)] {
        y_true.extend(std::iter::repeat_n(t, n));
        y_pred.extend(std::iter::repeat_n(p, n));
    }
    let names = ["StM".to_string(), "Vac".to_string()];
    let (cm, rep) = evaluate(&y_true, &y_pred, &names).map_err(|e| e.to_string())?;
    let row = |i: usize| {
        let c = &rep.classes[i];
        format!(
            "{:.2}/{:.2}/{:.2}/{}",
            c.precision, c.recall, c.f1, c.support
        )
    };
    let (stm, vac) = (row(0), row(1));
    check(
        cm.counts == vec![vec![584, 12], vec![11, 1780]]
            && stm == "0.98/0.98/0.98/596"
            && vac == "0.99/0.99/0.99/1791",
        format!("StM {stm}; Vac {vac}"),
    )
}

fn blobs() -> Vec<Vec<f64>> {
    let noise = Normal::new(0.0, 1.0).unwrap();
    let mut r = rng(9);
    let centers = [
        [0.0; 5],
        [5.0, 5.0, 0.0, 0.0, 0.0],
        [0.0, 5.0, 5.0, 0.0, 5.0],
        [5.0, 0.0, 0.0, 5.0, 5.0],
    ];
    centers
        .iter()
        .flat_map(|c| {
            (0..250)
                .map(|_| {
                    c.iter()
                        .map(|m| m + noise.sample(&mut r))
                        .collect::<Vec<f64>>()
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn c9_clustering() -> Outcome {
    let points = blobs();
    let mut runs = 0;
    let mut monotone = true;
    for k in 2..=8 {
        for seed in 0..5 {
            let r = kmeans(&points, &KMeansConfig::new(k, seed)).map_err(|e| e.to_string())?;
            monotone &= r.inertia_trace.windows(2).all(|w| w[1] <= w[0]);
            runs += 1;
        }
    }
    let cfg = HacConfig::new(4, Linkage::Average);
    let first = hac(&points, &cfg).map_err(|e| e.to_string())?;
    let second = hac(&points, &cfg).map_err(|e| e.to_string())?;
    let deterministic = first.merges == second.merges && first.assignment == second.assignment;

    let mut r = rng(19);
    let sources: Vec<[f64; 2]> = (0..2000)
        .map(|i| [(i as f64 * 0.05).sin(), r.random_range(-1.0..1.0)])
        .collect();
    let mixed: Vec<Vec<f64>> = sources
        .iter()
        .map(|s| vec![s[0] + 0.6 * s[1], 0.4 * s[0] + s[1]])
        .collect();
    let (model, recovered) = fast_ica(&mixed, &IcaConfig::new(2, 0)).map_err(|e| e.to_string())?;
    let col = |j: usize| recovered.iter().map(|r| r[j]).collect::<Vec<_>>();
    let best: Vec<f64> = (0..2)
        .map(|j| {
            let truth: Vec<f64> = sources.iter().map(|s| s[j]).collect();
            (0..2)
                .map(|c| pearson(&truth, &col(c)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let ica_ok = model.converged && model.iterations <= 200 && best.iter().all(|&b| b >= 0.95);
    check(
        monotone && deterministic && ica_ok,
        format!(
            "k-means {runs} runs monotone={monotone}; HAC {} merges deterministic={deterministic}; ICA |r| = {:.4}, {:.4} in {} iterations",
            first.merges.len(),
            best[0],
            best[1],
            model.iterations
        ),
    )
}

fn c10_markov() -> Outcome {
    let g = Categorical::new(token_names(40), &zipf_weights(40, 1.0));
    let corpus = g.corpus("train", 300, 15, 10);
    let allowed: HashSet<(String, String)> = corpus
        .texts()
        .flat_map(|t| {
            let toks: Vec<&str> = t.split(' ').collect();
            toks.windows(2)
                .map(|w| (w[0].to_string(), w[1].to_string()))
                .collect::<Vec<_>>()
        })
        .collect();
    let model = fit_markov(&corpus, 1).map_err(|e| e.to_string())?;
    let sequences = model
        .generate_many(&[], 1000, 40, 10)
        .map_err(|e| e.to_string())?;
    let mut bigrams = 0;
    let mut unseen = 0;
    for s in &sequences {
        let toks: Vec<&str> = s.split(' ').collect();
        for w in toks.windows(2) {
            bigrams += 1;
            unseen += usize::from(!allowed.contains(&(w[0].to_string(), w[1].to_string())));
        }
    }
    let worst = model
        .transitions
        .values()
        .chain(std::iter::once(&model.start_contexts))
        .map(|d| (d.iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    check(
        sequences.len() == 1000 && unseen == 0 && worst <= 1e-9,
        format!("{bigrams} generated bigrams, {unseen} unseen; max |sum - 1| = {worst:e}"),
    )
}

fn run_tdd(dir: &Path, args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_tdd"))
        .args(args)
        .current_dir(dir)
        .env_remove("TDD_LEXICON")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "tdd {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

const PIPELINE: &[&[&str]] = &[
    &[
        "ingest",
        "--input",
        "raw.jsonl",
        "--topic-field",
        "topic",
        "--abusive-words",
        "abusive.txt",
        "--output",
        "docs.jsonl",
    ],
    &[
        "sentiment-label",
        "--input",
        "docs.jsonl",
        "--lower",
        "0",
        "--upper",
        "0",
        "--output",
        "sent_0.jsonl",
    ],
    &[
        "sentiment-label",
        "--input",
        "docs.jsonl",
        "--lower=-0.4",
        "--upper",
        "0.4",
        "--output",
        "sent_04.jsonl",
        "--pos-output",
        "pos.jsonl",
        "--neg-output",
        "neg.jsonl",
    ],
    &[
        "markov-gen",
        "--input",
        "pos.jsonl",
        "--count",
        "100",
        "--seed",
        "7",
        "--output",
        "pos_gen.txt",
    ],
    &[
        "markov-gen",
        "--input",
        "neg.jsonl",
        "--count",
        "100",
        "--seed",
        "7",
        "--output",
        "neg_gen.txt",
    ],
    &[
        "kltdc",
        "--original",
        "pos.jsonl",
        "--candidate",
        "pos_gen.txt",
        "--k",
        "100",
        "--baseline-frac",
        "0.1",
        "--seed",
        "7",
        "--name",
        "Pos",
        "--output",
        "pos_report.json",
    ],
    &[
        "kltdc",
        "--original",
        "neg.jsonl",
        "--candidate",
        "neg_gen.txt",
        "--k",
        "100",
        "--baseline-frac",
        "0.1",
        "--seed",
        "7",
        "--name",
        "Neg",
        "--output",
        "neg_report.json",
    ],
    &[
        "report",
        "--inputs",
        "pos_report.json",
        "neg_report.json",
        "--output",
        "table.csv",
    ],
];

fn run_pipeline(dir: &Path) -> Result<(Duration, BTreeMap<String, Vec<u8>>), String> {
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    std::fs::copy(data.join("sample_corpus.jsonl"), dir.join("raw.jsonl"))
        .map_err(|e| e.to_string())?;
    std::fs::copy(data.join("abusive_words.txt"), dir.join("abusive.txt"))
        .map_err(|e| e.to_string())?;
    let start = Instant::now();
    for step in PIPELINE {
        run_tdd(dir, step)?;
    }
    let elapsed = start.elapsed();
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        files.insert(
            path.file_name().unwrap().to_string_lossy().into_owned(),
            bytes,
        );
    }
    Ok((elapsed, files))
}

fn c11_cli() -> Outcome {
    let raw_docs = std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_corpus.jsonl"),
    )
    .map_err(|e| e.to_string())?
    .lines()
    .count();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (t1, first) = run_pipeline(a.path())?;
    let (t2, second) = run_pipeline(b.path())?;
    let reports = [
        "pos_report.json",
        "neg_report.json",
        "pos_report.csv",
        "neg_report.csv",
        "table.csv",
    ];
    let all_present = reports.iter().all(|r| first.contains_key(*r));
    let identical = first == second;
    let table = String::from_utf8_lossy(first.get("table.csv").map_or(&[][..], |v| v.as_slice()))
        .into_owned();
    check(
        raw_docs == 400 && all_present && identical && t1.max(t2) <= Duration::from_secs(30),
        format!(
            "{raw_docs} docs; runs {t1:.2?} / {t2:.2?}; {} files byte-identical={identical}; table {}",
            first.len(),
            table.trim().replace('\n', " | ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("KL-TDC identity", c1_identity),
        ("Gibbs inequality", c2_gibbs),
        ("brute-force oracle", c3_oracle),
        ("synthetic protocol replication", c4_protocol),
        ("relative-mode analytic check", c5_relative),
        ("softmax contract", c6_softmax),
        ("classifier correctness", c7_classifiers),
        ("report arithmetic", c8_report),
        ("clustering", c9_clustering),
        ("Markov closure", c10_markov),
        ("end-to-end CLI", c11_cli),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (status, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{status} [{:>2}] {name} ({:.2?}): {detail}",
            i + 1,
            start.elapsed()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
