use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::MultiCircleLayout;

pub const LAYOUT_FORMAT_VERSION: u32 = 1;

/// Versioned layout export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub v: u32,
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub letter: Option<char>,
    #[serde(flatten)]
    pub layout: MultiCircleLayout,
}

impl LayoutDocument {
    pub fn new(method: impl Into<String>, letter: Option<char>, layout: MultiCircleLayout) -> Self {
        Self {
            v: LAYOUT_FORMAT_VERSION,
            method: method.into(),
            letter,
            layout,
        }
    }
}

pub fn layout_json(doc: &LayoutDocument) -> String {
    serde_json::to_string_pretty(doc).expect("layout serializes")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// SVG in the screen frame (y up, one unit = central field-of-view radius):
/// one path per circle and a text element at each label.
pub fn layout_svg(layout: &MultiCircleLayout) -> String {
    let extent = layout
        .circles
        .iter()
        .map(|c| c.radius)
        .fold(1.0_f64, f64::max)
        + 0.5
        + layout.center.norm();
    let (cx, cy) = (layout.center.x, -layout.center.y);
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.4} {:.4} {:.4} {:.4}">"#,
        -extent,
        -extent,
        2.0 * extent,
        2.0 * extent
    );
    let _ = writeln!(
        svg,
        r##"  <circle cx="0" cy="0" r="1" fill="none" stroke="#bbb" stroke-width="0.005" stroke-dasharray="0.03 0.03"/>"##
    );
    for c in &layout.circles {
        let r = c.radius;
        let _ = writeln!(
            svg,
            r##"  <path d="M {:.4} {:.4} a {r:.4} {r:.4} 0 1 0 {:.4} 0 a {r:.4} {r:.4} 0 1 0 {:.4} 0" fill="none" stroke="#888" stroke-width="0.006" data-circle="{}"/>"##,
            cx - r,
            cy,
            2.0 * r,
            -2.0 * r,
            c.index
        );
        for l in &c.entries {
            let p = c.position_of(layout.center, l);
            let _ = writeln!(
                svg,
                r#"  <text x="{:.4}" y="{:.4}" font-size="0.05" text-anchor="middle" dominant-baseline="middle" data-id="{}" data-radian="{:.6}">{}</text>"#,
                p.x,
                -p.y,
                l.id.0,
                l.rad,
                escape(&l.text)
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScreenVec;
    use crate::layout::{CircleLayout, Label, RadianRange};

    fn sample() -> MultiCircleLayout {
        let mut l = MultiCircleLayout::empty(ScreenVec::new(1.0, 0.0));
        let mut c = CircleLayout::new(0, 1.0);
        let mut lab = Label::oriented(3, "a<b", 0.5, RadianRange::around(0.5, 1.0));
        lab.circle_index = Some(0);
        c.entries.push(lab);
        l.circles.push(c);
        l
    }

    #[test]
    fn json_has_version_and_fields() {
        let doc = LayoutDocument::new("ec3", Some('a'), sample());
        let v: serde_json::Value = serde_json::from_str(&layout_json(&doc)).unwrap();
        assert_eq!(v["v"], 1);
        let lab = &v["circles"][0]["labels"][0];
        assert_eq!(lab["id"], 3);
        assert_eq!(lab["circle_index"], 0);
        assert!(lab["radian"].is_number());
        assert_eq!(lab["range"].as_array().unwrap().len(), 2);
        let back: LayoutDocument = serde_json::from_str(&layout_json(&doc)).unwrap();
        assert_eq!(back, doc);
    }

    #[test]
    fn svg_escapes_text() {
        let s = layout_svg(&sample());
        assert!(s.contains("a&lt;b"));
        assert_eq!(s.matches("<path").count(), 1);
        assert_eq!(s.matches("<text").count(), 1);
    }
}
