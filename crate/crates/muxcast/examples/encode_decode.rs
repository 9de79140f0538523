//! Scaling and the three multiplexing schemes, end to end.
//!
//! Run with: cargo run -p muxcast --example encode_decode

use muxcast::multiplex::{demux, mux, MuxLayout, MuxScheme, TokenVocabulary};
use muxcast::scaling::{apply_scale, fit_scale, invert_scale, ScaleParams};

fn main() -> muxcast::Result<()> {
    // a 2-dimensional series, two timestamps shown
    let d1 = [1.7, 2.6];
    let d2 = [2.3, 3.1];
    println!("input: d1 = {d1:?}, d2 = {d2:?}\n");

    // with a fixed offset-0, factor-10 mapping the values become
    // 2-digit integers
    let params = ScaleParams::new(0.0, 10.0, 2);
    let ints = vec![apply_scale(&d1, &params), apply_scale(&d2, &params)];
    println!("scaled integers: {ints:?}\n");

    // render under each scheme
    let vocab = TokenVocabulary::digits();
    for scheme in MuxScheme::ALL {
        let layout = MuxLayout::new(scheme, 2, 2)?;
        let stream = mux(&ints, &layout, &vocab)?;
        println!("{scheme}: {stream}");

        // decoding inverts the stream exactly
        let (decoded, timestamps) = demux(&stream, &layout, &vocab)?;
        assert_eq!(decoded, ints);
        assert_eq!(timestamps, 2);
    }

    // a truncated continuation decodes to its complete timestamps only
    let layout = MuxLayout::new(MuxScheme::Vi, 2, 2)?;
    let (partial, timestamps) = demux("3145,26", &layout, &vocab)?;
    println!("\ntruncated \"3145,26\" decodes {timestamps} timestamp: {partial:?}");
    let back = invert_scale(&partial[0], &params)?;
    println!("dim 1 of it descales to {back:?}");

    // production use fits the mapping on the history, leaving headroom
    // above the observed range for the forecast
    let fitted = fit_scale(&d1, 2, 1.25)?;
    println!(
        "\nfitted scale for d1: offset {}, factor {:.2}, max representable {:.3}",
        fitted.offset,
        fitted.factor,
        fitted.offset + fitted.max_int() as f64 / fitted.factor
    );
    Ok(())
}
