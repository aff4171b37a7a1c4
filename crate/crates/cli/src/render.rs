//! Top-down scene previews as SVG.
//!
//! The drawing is in plane-local meters: `x` is `u` (local x) and `y` is `v`
//! (local z), so `v` grows downward. Every coordinate is printed from exact
//! nanometer integers, which makes the output byte-stable and lets object
//! rectangles be compared exactly against the layout engine's footprints.

use std::fmt::Write;

use microar_core::layout::{object_footprint, scene_footprint, BoundsSource, Footprint};
use microar_core::Story;

use crate::error::CliError;

const WIDTH_PX: i128 = 800;
const MIN_SPAN_NM: i64 = 1_000_000_000;

/// Meters with up to nine decimals, no trailing zeros.
pub fn format_nm(nm: i64) -> String {
    let sign = if nm < 0 { "-" } else { "" };
    let abs = nm.unsigned_abs();
    let (whole, frac) = (abs / 1_000_000_000, abs % 1_000_000_000);
    if frac == 0 {
        return format!("{sign}{whole}");
    }
    let frac = format!("{frac:09}");
    format!("{sign}{whole}.{}", frac.trim_end_matches('0'))
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' && c != '\n' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn rect_attrs(fp: &Footprint) -> String {
    format!(
        "x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" data-min-u-nm=\"{}\" data-min-v-nm=\"{}\" data-max-u-nm=\"{}\" data-max-v-nm=\"{}\"",
        format_nm(fp.min_u_nm),
        format_nm(fp.min_v_nm),
        format_nm(fp.max_u_nm - fp.min_u_nm),
        format_nm(fp.max_v_nm - fp.min_v_nm),
        fp.min_u_nm,
        fp.min_v_nm,
        fp.max_u_nm,
        fp.max_v_nm,
    )
}

struct Callout {
    from: [i64; 2],
    at: [i64; 2],
    text: String,
}

/// Renders scene `index` of `story`.
pub fn render_scene(
    story: &Story,
    index: usize,
    bounds: &dyn BoundsSource,
) -> Result<String, CliError> {
    let scene = story.scenes.get(index).ok_or_else(|| {
        CliError::not_found(
            "scene_out_of_range",
            format!(
                "scene {index} does not exist; the story has {}",
                story.scenes.len()
            ),
        )
    })?;
    let footprints: Vec<Footprint> = scene
        .objects
        .iter()
        .map(|o| object_footprint(&o.transform, &bounds.bounds(&o.asset)))
        .collect();
    let total = scene_footprint(scene, bounds);

    let callouts: Vec<Callout> = scene
        .objects
        .iter()
        .filter_map(|o| {
            let d = o.dialog.as_ref()?;
            let p = o.transform.position_um();
            let off = d.offset().micros();
            Some(Callout {
                from: [p[0] * 1000, p[2] * 1000],
                at: [(p[0] + off[0]) * 1000, (p[2] + off[2]) * 1000],
                text: d.text().to_owned(),
            })
        })
        .collect();

    let (mut lo, mut hi) = ([0i64; 2], [0i64; 2]);
    if !scene.objects.is_empty() {
        lo = [total.min_u_nm.min(0), total.min_v_nm.min(0)];
        hi = [total.max_u_nm.max(0), total.max_v_nm.max(0)];
    }
    for c in &callouts {
        for k in 0..2 {
            lo[k] = lo[k].min(c.at[k]);
            hi[k] = hi[k].max(c.at[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(MIN_SPAN_NM);
    let pad = span / 10;
    let font = span / 30;
    let stroke = (span / 400).max(1);
    lo[1] -= font * 2;
    let (x0, y0) = (lo[0] - pad, lo[1] - pad);
    let (w, h) = (hi[0] - lo[0] + 2 * pad, hi[1] - lo[1] + 2 * pad);
    let height_px = (WIDTH_PX * h as i128 + w as i128 / 2) / w as i128;

    let f = format_nm;
    let mut s = String::new();
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH_PX}\" height=\"{height_px}\" viewBox=\"{} {} {} {}\" data-scene-index=\"{index}\" data-scene-id=\"{}\">",
        f(x0),
        f(y0),
        f(w),
        f(h),
        scene.scene_id,
    );
    let _ = writeln!(
        s,
        "<title>{} - scene {}</title>",
        escape(&story.metadata.title),
        index + 1
    );
    let _ = writeln!(s, "<rect class=\"background\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", f(x0), f(y0), f(w), f(h));
    let _ = writeln!(
        s,
        "<g class=\"axes\" stroke=\"#888888\" stroke-width=\"{}\">",
        f(stroke)
    );
    let _ = writeln!(
        s,
        "<line class=\"axis-u\" x1=\"{}\" y1=\"0\" x2=\"{}\" y2=\"0\"/>",
        f(x0),
        f(x0 + w)
    );
    let _ = writeln!(
        s,
        "<line class=\"axis-v\" x1=\"0\" y1=\"{}\" x2=\"0\" y2=\"{}\"/>",
        f(y0),
        f(y0 + h)
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        "<g class=\"axis-labels\" font-family=\"sans-serif\" font-size=\"{}\" fill=\"#888888\">",
        f(font)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\">u</text>",
        f(x0 + w - font),
        f(-font / 2)
    );
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\">v</text>",
        f(font / 2),
        f(y0 + h - font / 2)
    );
    let _ = writeln!(s, "</g>");

    if !scene.objects.is_empty() {
        let _ = writeln!(
            s,
            "<rect class=\"scene-footprint\" {} fill=\"none\" stroke=\"#3366cc\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>",
            rect_attrs(&total),
            f(stroke),
            f(stroke * 4),
            f(stroke * 2),
        );
        let _ = writeln!(s, "<g class=\"objects\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">", f(font));
        for (o, fp) in scene.objects.iter().zip(&footprints) {
            let cx = fp.min_u_nm + (fp.max_u_nm - fp.min_u_nm) / 2;
            let cy = fp.min_v_nm + (fp.max_v_nm - fp.min_v_nm) / 2;
            let _ = writeln!(
                s,
                "<rect class=\"object\" data-object-id=\"{}\" data-asset-key=\"{}\" {} fill=\"#cc8833\" fill-opacity=\"0.25\" stroke=\"#cc8833\" stroke-width=\"{}\"/>",
                o.object_id,
                escape(o.asset.asset_key()),
                rect_attrs(fp),
                f(stroke),
            );
            let _ = writeln!(
                s,
                "<text class=\"label\" x=\"{}\" y=\"{}\">{}</text>",
                f(cx),
                f(cy),
                escape(o.asset.display_name())
            );
        }
        let _ = writeln!(s, "</g>");
    }

    if !callouts.is_empty() {
        let _ = writeln!(s, "<g class=\"dialogs\" font-family=\"sans-serif\" font-size=\"{}\" text-anchor=\"middle\">", f(font));
        for c in &callouts {
            let ty = c.at[1] - font;
            let _ = writeln!(
                s,
                "<line class=\"leader\" x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#333333\" stroke-width=\"{}\"/>",
                f(c.from[0]),
                f(c.from[1]),
                f(c.at[0]),
                f(ty),
                f(stroke),
            );
            let _ = writeln!(
                s,
                "<text class=\"callout\" x=\"{}\" y=\"{}\">{}</text>",
                f(c.at[0]),
                f(ty),
                escape(&c.text)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "</svg>");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_nanometers_exactly() {
        assert_eq!(format_nm(0), "0");
        assert_eq!(format_nm(-500_000_000), "-0.5");
        assert_eq!(format_nm(1_000_000_000), "1");
        assert_eq!(format_nm(1_234_000_001), "1.234000001");
        assert_eq!(format_nm(-7), "-0.000000007");
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("<a & \"b\">"), "&lt;a &amp; &quot;b&quot;&gt;");
    }
}
