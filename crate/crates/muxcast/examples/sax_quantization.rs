//! PAA segmentation, symbol alphabets, and the token-count reduction.
//!
//! Run with: cargo run -p muxcast --example sax_quantization

use muxcast::sax::{
    breakpoints, norm_stats, paa, render_symbols, sax_decode, sax_encode_column, AlphabetKind,
    SaxConfig,
};

fn main() -> muxcast::Result<()> {
    // equiprobable breakpoints under a standard normal
    let beta = breakpoints(5)?;
    println!("breakpoints(5): {beta:.4?}");

    // segment means: a short tail segment averages what is left
    let column: Vec<f64> = (0..296)
        .map(|t| 20.0 + 3.0 * (t as f64 / 9.0).sin() + (t as f64 / 31.0).cos())
        .collect();
    let coefficients = paa(&column[..8], 3);
    println!("paa of {:?} (w=3): {coefficients:?}\n", &column[..8]);

    // encode a full column with history statistics
    let config = SaxConfig {
        segment_length: 6,
        alphabet_size: 5,
        alphabet_kind: AlphabetKind::Alphabetical,
    };
    let stats = norm_stats(&column)?;
    let word = sax_encode_column(&column, &config, stats)?;
    println!(
        "column of {} points, mean {:.3}, std {:.3}",
        column.len(),
        stats.mean,
        stats.std
    );
    println!(
        "encodes to {} symbols (one per {} points):",
        word.symbols.len(),
        config.segment_length
    );
    println!("  {}", render_symbols(&word)?);

    // token economy versus the digit encoding
    let digit_chars = column.len() * 3;
    println!(
        "\ntoken budget: {} SAX symbols versus {} digit characters at b=3",
        word.symbols.len(),
        digit_chars
    );

    // the digital alphabet renders the same indices as digits
    let digital = SaxConfig {
        alphabet_kind: AlphabetKind::Digital,
        ..config
    };
    let digital_word = sax_encode_column(&column, &digital, stats)?;
    println!("digital rendering: {}", render_symbols(&digital_word)?);

    // reconstruction: truncated-interval means, de-normalized, repeated
    let reconstructed = sax_decode(&word);
    assert_eq!(reconstructed.len(), column.len());
    let worst = column
        .iter()
        .zip(&reconstructed)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    println!("\nreconstruction error (max abs): {worst:.4}");
    Ok(())
}
