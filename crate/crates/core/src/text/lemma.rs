//! Suffix-stripping lemmatizer used by the built-in parser and by topic
//! phrase matching.

use super::Pos;

const IRREGULAR: &[(&str, &str)] = &[
    ("is", "be"),
    ("are", "be"),
    ("was", "be"),
    ("were", "be"),
    ("been", "be"),
    ("being", "be"),
    ("am", "be"),
    ("'s", "be"),
    ("has", "have"),
    ("had", "have"),
    ("having", "have"),
    ("does", "do"),
    ("did", "do"),
    ("done", "do"),
    ("n't", "not"),
    ("rose", "rise"),
    ("risen", "rise"),
    ("fell", "fall"),
    ("fallen", "fall"),
    ("grew", "grow"),
    ("grown", "grow"),
    ("shrank", "shrink"),
    ("shrunk", "shrink"),
    ("sank", "sink"),
    ("sunk", "sink"),
    ("went", "go"),
    ("gone", "go"),
    ("came", "come"),
    ("took", "take"),
    ("taken", "take"),
    ("gave", "give"),
    ("given", "give"),
    ("made", "make"),
    ("kept", "keep"),
    ("held", "hold"),
    ("led", "lead"),
    ("paid", "pay"),
    ("said", "say"),
    ("told", "tell"),
    ("thought", "think"),
    ("brought", "bring"),
    ("bought", "buy"),
    ("sold", "sell"),
    ("began", "begin"),
    ("begun", "begin"),
    ("became", "become"),
    ("struck", "strike"),
    ("spent", "spend"),
    ("stood", "stand"),
    ("won", "win"),
    ("lost", "lose"),
    ("left", "leave"),
    ("met", "meet"),
    ("saw", "see"),
    ("seen", "see"),
    ("fought", "fight"),
    ("slid", "slide"),
    ("soared", "soar"),
    ("children", "child"),
    ("people", "people"),
    ("economies", "economy"),
];

/// Words ending in -s that are not plurals.
const NOT_PLURAL: &[&str] = &[
    "news", "crisis", "basis", "analysis", "thesis", "economics", "always", "perhaps", "this",
    "its", "his", "has", "was", "is", "as", "us", "less", "unless", "across", "versus", "plus",
    "bonus", "stimulus", "consensus", "status", "focus", "census", "gas", "whereas", "thus",
    "series", "species", "politics", "statistics",
];

fn is_vowel(c: u8) -> bool {
    matches!(c, b'a' | b'e' | b'i' | b'o' | b'u')
}

fn vowel_groups(b: &[u8]) -> usize {
    let mut groups = 0;
    let mut in_vowel = false;
    for &c in b {
        let v = is_vowel(c);
        if v && !in_vowel {
            groups += 1;
        }
        in_vowel = v;
    }
    groups
}

/// Restores a silent final `e` dropped by -ing / -ed inflection and undoes
/// consonant doubling.
fn restore_e(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if n < 2 {
        return stem.to_string();
    }
    let last = b[n - 1];
    let prev = b[n - 2];
    let before = if n >= 3 { Some(b[n - 3]) } else { None };
    let consonant_before = before.is_some_and(|c| !is_vowel(c));
    if last == prev && !is_vowel(last) {
        // running -> run, controlling -> control, but falling -> fall
        let keep = match last {
            b's' | b'z' | b'f' => true,
            b'l' => vowel_groups(b) < 2,
            _ => false,
        };
        if !keep {
            return stem[..n - 1].to_string();
        }
        return stem.to_string();
    }
    let add_e = match last {
        b'c' | b'v' | b'z' | b'u' => true,
        b's' => is_vowel(prev) && prev != b'u',
        b't' => (prev == b'a' && consonant_before) || prev == b'u',
        b'n' => prev == b'i' && consonant_before,
        b'g' => prev == b'n' && before == Some(b'a'),
        b'k' | b'm' | b'p' | b'r' | b'd' | b'b' | b'l' => {
            // single-syllable CVC: making -> make, sharing -> share
            is_vowel(prev) && consonant_before && vowel_groups(b) == 1
        }
        _ => false,
    };
    if add_e {
        format!("{stem}e")
    } else {
        stem.to_string()
    }
}

/// Lemma for a lowercase word with a coarse tag.
pub fn lemmatize(word: &str, pos: Pos) -> String {
    let w = word.to_lowercase();
    if let Some((_, l)) = IRREGULAR.iter().find(|(f, _)| *f == w) {
        return (*l).to_string();
    }
    if w.len() <= 3 || !w.bytes().all(|c| c.is_ascii_alphabetic() || c == b'-') {
        return w;
    }
    match pos {
        Pos::Verb | Pos::Aux | Pos::Noun | Pos::Adj => {}
        _ => return w,
    }
    if matches!(pos, Pos::Verb | Pos::Aux) || (pos == Pos::Adj && (w.ends_with("ing") || w.ends_with("ed"))) {
        if let Some(stem) = w.strip_suffix("ing") {
            if stem.len() >= 2 {
                return restore_e(stem);
            }
        }
        if let Some(stem) = w.strip_suffix("ied") {
            return format!("{stem}y");
        }
        if let Some(stem) = w.strip_suffix("ed") {
            if stem.len() >= 2 {
                return restore_e(stem);
            }
        }
    }
    if matches!(pos, Pos::Noun | Pos::Verb) && !NOT_PLURAL.contains(&w.as_str()) {
        if let Some(stem) = w.strip_suffix("ies") {
            return format!("{stem}y");
        }
        for suffix in ["sses", "shes", "ches", "xes"] {
            if w.ends_with(suffix) {
                return w[..w.len() - 2].to_string();
            }
        }
        if w.ends_with('s') && !w.ends_with("ss") && !w.ends_with("us") && !w.ends_with("is") {
            return w[..w.len() - 1].to_string();
        }
    }
    w
}
