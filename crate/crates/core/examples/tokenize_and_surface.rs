//! Tokenizes a few code-mixed messages and prints their surface counts and
//! character n-grams.
//!
//! cargo run --example tokenize_and_surface -- "your own text here"

use tritask::text::{surface_features, tokenize, FeatureUnit};

fn main() {
    let mut texts: Vec<String> = std::env::args().skip(1).collect();
    if texts.is_empty() {
        texts = vec![
            "Tum log kabhi nahi sudhroge!! 😡😡".into(),
            "আমি তোমাকে ভালোবাসি... but why?".into(),
            "Only 2 days left, 100% sure. Stay home".into(),
        ];
    }
    for text in &texts {
        let s = surface_features(text);
        println!("{text}");
        println!("  tokens      {:?}", tokenize(text));
        println!(
            "  words {} sentences {} punctuation {} numbers {} emoji {}",
            s.words, s.sentences, s.punctuation, s.numbers, s.emoji
        );
        let grams = FeatureUnit::CharNgram { min: 2, max: 3 }.terms(text);
        println!(
            "  char 2-3 grams: {} (first {:?})",
            grams.len(),
            &grams[..grams.len().min(6)]
        );
    }
}
