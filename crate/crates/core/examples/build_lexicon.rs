//! Regenerates `lexicon/fragment.lex` from `lexicon/closed_class.lex` and the
//! synthetic open class.
//!
//!     cargo run -p lexlab --example build_lexicon

use std::collections::HashSet;
use std::path::Path;

use lexlab::mother::{synth, GoldLexicon, OPEN_CLASS_MARKER};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("lexicon");
    let closed = std::fs::read_to_string(dir.join("closed_class.lex"))?;
    let closed_lex = GoldLexicon::load_with_ratio(&closed, None)?;
    let reserved: HashSet<String> = closed_lex.templates().map(|t| t.phonform.clone()).collect();
    let open = synth::render_open_class(&synth::SynthSpec::default(), &reserved);
    let text = format!("{}\n{OPEN_CLASS_MARKER}\n{open}", closed.trim_end());
    std::fs::write(dir.join("fragment.lex"), &text)?;
    let lex = GoldLexicon::load(&text)?;
    println!("wrote {} templates ({} closed, {} open)", lex.len(), lex.closed_class().len(), lex.open_class().len());
    Ok(())
}
