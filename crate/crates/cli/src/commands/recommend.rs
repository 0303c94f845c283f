use crate::cli::RecommendArgs;
use anyhow::{anyhow, bail, Context, Result};
use elicit_core::data::snapshot;
use elicit_core::model::{recommend as rank, Checkpoint};
use std::io::{BufRead, Write};
use std::path::Path;

fn answer(token: &str) -> Option<f32> {
    match token {
        "1" => Some(1.0),
        "0" => Some(0.0),
        _ => None,
    }
}

/// Parses a feedback file: whitespace-separated 0/1 values, one per seed.
pub fn parse_feedback(text: &str, k: usize) -> Result<Vec<f32>> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != k {
        bail!("expected {k} answers (one per seed item), got {}", tokens.len());
    }
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| answer(t).ok_or_else(|| anyhow!("answer {} is {t:?}; answers must be 0 or 1", i + 1)))
        .collect()
}

/// Asks for each seed in turn until a 0 or 1 is given.
pub fn ask(seed_tokens: &[String], input: &mut dyn BufRead, prompt: &mut dyn Write) -> Result<Vec<f32>> {
    let mut out = Vec::with_capacity(seed_tokens.len());
    for token in seed_tokens {
        loop {
            write!(prompt, "do you like item {token}? (1 = yes, 0 = no): ")?;
            prompt.flush()?;
            let mut line = String::new();
            if input.read_line(&mut line)? == 0 {
                bail!("input ended before all seed items were answered");
            }
            match answer(line.trim()) {
                Some(v) => {
                    out.push(v);
                    break;
                }
                None => writeln!(prompt, "please answer 1 or 0")?,
            }
        }
    }
    Ok(out)
}

pub fn load_item_map(path: &Path, m: usize) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading item map {}", path.display()))?;
    let tokens = snapshot::parse_map(&text).with_context(|| format!("in {}", path.display()))?;
    if tokens.len() != m {
        bail!("item map {} has {} items, the model has {m}", path.display(), tokens.len());
    }
    Ok(tokens)
}

/// Top-N item tokens for a new user.
pub fn recommend(args: &RecommendArgs, input: &mut dyn BufRead, prompt: &mut dyn Write) -> Result<Vec<String>> {
    let path = &args.checkpoint;
    let bytes = std::fs::read(path).with_context(|| format!("reading checkpoint {}", path.display()))?;
    let model = Checkpoint::from_bytes(&bytes).with_context(|| format!("decoding {}", path.display()))?;
    let map_dir = match &args.dataset {
        Some(d) => d.clone(),
        None => path.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    let items = load_item_map(&map_dir.join(snapshot::ITEMS_FILE), model.m())?;
    let seed_tokens: Vec<String> = model.seeds.items().iter().map(|&j| items[j].clone()).collect();
    let feedback = match (&args.feedback, args.interactive) {
        (Some(f), _) => {
            let text = std::fs::read_to_string(f).with_context(|| format!("reading feedback {}", f.display()))?;
            parse_feedback(&text, model.k()).with_context(|| format!("in {}", f.display()))?
        }
        (None, true) => ask(&seed_tokens, input, prompt)?,
        (None, false) => bail!("pass --feedback FILE or --interactive"),
    };
    let top = rank(&model.decoder, &model.seeds, &feedback, args.top_n)?;
    Ok(top.into_iter().map(|j| items[j].clone()).collect())
}
