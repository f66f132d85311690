//! Deterministic part-of-speech tagging: a digit/punctuation pass, a
//! case-insensitive lexicon, then suffix rules for unknown words.

use std::collections::HashMap;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Verb,
    Noun,
    Adj,
    Adv,
    Pron,
    /// Cardinal number.
    Cd,
    /// Coordinating conjunction.
    Cc,
    /// Predeterminer.
    Pdt,
    /// Interjection.
    Uh,
    Other,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Verb => "VERB",
            PosTag::Noun => "NOUN",
            PosTag::Adj => "ADJ",
            PosTag::Adv => "ADV",
            PosTag::Pron => "PRON",
            PosTag::Cd => "CD",
            PosTag::Cc => "CC",
            PosTag::Pdt => "PDT",
            PosTag::Uh => "UH",
            PosTag::Other => "OTHER",
        }
    }

    pub fn parse(s: &str) -> Option<PosTag> {
        Some(match s {
            "VERB" => PosTag::Verb,
            "NOUN" => PosTag::Noun,
            "ADJ" => PosTag::Adj,
            "ADV" => PosTag::Adv,
            "PRON" => PosTag::Pron,
            "CD" => PosTag::Cd,
            "CC" => PosTag::Cc,
            "PDT" => PosTag::Pdt,
            "UH" => PosTag::Uh,
            "OTHER" => PosTag::Other,
            _ => return None,
        })
    }
}

/// Per-class tag frequencies, in feature-column order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PosCounts {
    pub verbs: u32,
    pub nouns: u32,
    pub adjectives: u32,
    pub adverbs: u32,
    pub pronouns: u32,
    pub cardinals: u32,
    pub coord_conj: u32,
    pub predeterminers: u32,
    pub interjections: u32,
}

impl PosCounts {
    pub fn as_array(&self) -> [u32; 9] {
        [
            self.verbs,
            self.nouns,
            self.adjectives,
            self.adverbs,
            self.pronouns,
            self.cardinals,
            self.coord_conj,
            self.predeterminers,
            self.interjections,
        ]
    }
}

pub fn pos_counts(tags: &[PosTag]) -> PosCounts {
    let mut c = PosCounts::default();
    for tag in tags {
        match tag {
            PosTag::Verb => c.verbs += 1,
            PosTag::Noun => c.nouns += 1,
            PosTag::Adj => c.adjectives += 1,
            PosTag::Adv => c.adverbs += 1,
            PosTag::Pron => c.pronouns += 1,
            PosTag::Cd => c.cardinals += 1,
            PosTag::Cc => c.coord_conj += 1,
            PosTag::Pdt => c.predeterminers += 1,
            PosTag::Uh => c.interjections += 1,
            PosTag::Other => {}
        }
    }
    c
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// Whitespace split, then leading and trailing non-alphanumeric characters
/// become one-character tokens. Inner hyphens, apostrophes and dots stay.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for word in text.split_whitespace() {
        let chars: Vec<char> = word.chars().collect();
        let start = chars.iter().position(|&c| !is_punct(c));
        let Some(start) = start else {
            tokens.extend(chars.iter().map(|c| c.to_string()));
            continue;
        };
        let end = chars.iter().rposition(|&c| !is_punct(c)).unwrap() + 1;
        tokens.extend(chars[..start].iter().map(|c| c.to_string()));
        tokens.push(chars[start..end].iter().collect());
        tokens.extend(chars[end..].iter().map(|c| c.to_string()));
    }
    tokens
}

static CARDINAL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^[0-9]+([.,][0-9]+)*$").unwrap());

const SUFFIX_RULES: [(&str, PosTag); 10] = [
    ("ly", PosTag::Adv),
    ("ing", PosTag::Verb),
    ("ed", PosTag::Verb),
    ("ize", PosTag::Verb),
    ("ise", PosTag::Verb),
    ("ous", PosTag::Adj),
    ("ful", PosTag::Adj),
    ("ive", PosTag::Adj),
    ("al", PosTag::Adj),
    ("able", PosTag::Adj),
];

const EMBEDDED_LEXICON: &str = include_str!("lexicon.tsv");

static DEFAULT_TAGGER: LazyLock<Tagger> =
    LazyLock::new(|| Tagger::from_tsv(EMBEDDED_LEXICON).expect("embedded lexicon parses"));

#[derive(Debug, Clone)]
pub struct Tagger {
    lexicon: HashMap<String, PosTag>,
}

impl Tagger {
    /// The tagger backed by the lexicon compiled into the crate.
    pub fn embedded() -> &'static Tagger {
        &DEFAULT_TAGGER
    }

    /// Parses `token<TAB>TAG` lines. Blank lines and `#` comments are skipped;
    /// later entries win over earlier ones.
    pub fn from_tsv(src: &str) -> Result<Tagger> {
        let mut lexicon = HashMap::new();
        for (lineno, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (token, tag) = line.split_once('\t').ok_or_else(|| {
                Error::param("lexicon", format!("line {}: expected token<TAB>TAG", lineno + 1))
            })?;
            let tag = PosTag::parse(tag.trim()).ok_or_else(|| {
                Error::param("lexicon", format!("line {}: unknown tag `{}`", lineno + 1, tag.trim()))
            })?;
            lexicon.insert(token.trim().to_lowercase(), tag);
        }
        Ok(Tagger { lexicon })
    }

    pub fn from_file(path: &Path) -> Result<Tagger> {
        let src = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Tagger::from_tsv(&src)
    }

    pub fn len(&self) -> usize {
        self.lexicon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
    }

    pub fn tag_token(&self, token: &str) -> PosTag {
        if CARDINAL_RE.is_match(token) {
            return PosTag::Cd;
        }
        if token.chars().all(is_punct) {
            return PosTag::Other;
        }
        let lower = token.to_lowercase();
        if let Some(&tag) = self.lexicon.get(&lower) {
            return tag;
        }
        // Suffix rules need at least a two-character stem.
        let len = lower.chars().count();
        SUFFIX_RULES
            .iter()
            .find(|(suffix, _)| len >= suffix.len() + 2 && lower.ends_with(suffix))
            .map(|&(_, tag)| tag)
            .unwrap_or(PosTag::Noun)
    }

    pub fn tag(&self, tokens: &[String]) -> Vec<PosTag> {
        tokens.iter().map(|t| self.tag_token(t)).collect()
    }
}

/// Tags with the embedded lexicon.
pub fn pos_tag(tokens: &[String]) -> Vec<PosTag> {
    Tagger::embedded().tag(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Assessment Methods"), toks(&["Assessment", "Methods"]));
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("objectives: (3 items)"),
            toks(&["objectives", ":", "(", "3", "items", ")"])
        );
        assert_eq!(tokenize("don't re-use 3.5."), toks(&["don't", "re-use", "3.5", "."]));
        assert_eq!(tokenize(" -- "), toks(&["-", "-"]));
    }

    #[test]
    fn tag_examples() {
        assert_eq!(pos_tag(&toks(&["2018"])), vec![PosTag::Cd]);
        assert_eq!(pos_tag(&toks(&["and"])), vec![PosTag::Cc]);
        assert_eq!(
            pos_tag(&toks(&["quickly", "frobnicating"])),
            vec![PosTag::Adv, PosTag::Verb]
        );
        assert_eq!(pos_tag(&toks(&["1,000.5", ":", "AND"])), vec![PosTag::Cd, PosTag::Other, PosTag::Cc]);
    }

    #[test]
    fn modals_are_not_verbs() {
        for m in ["will", "can", "must", "should", "may"] {
            assert_eq!(pos_tag(&toks(&[m])), vec![PosTag::Other], "{m}");
        }
    }

    #[test]
    fn closed_classes() {
        for w in ["or", "but", "nor", "yet", "so", "for"] {
            assert_eq!(Tagger::embedded().tag_token(w), PosTag::Cc, "{w}");
        }
        for w in ["all", "both", "half", "such", "quite", "rather"] {
            assert_eq!(Tagger::embedded().tag_token(w), PosTag::Pdt, "{w}");
        }
        for w in ["oh", "wow", "hey", "please", "yes", "no"] {
            assert_eq!(Tagger::embedded().tag_token(w), PosTag::Uh, "{w}");
        }
        for w in ["They", "her", "ourselves"] {
            assert_eq!(Tagger::embedded().tag_token(w), PosTag::Pron, "{w}");
        }
    }

    #[test]
    fn suffix_rules_and_default() {
        let t = Tagger::embedded();
        assert_eq!(t.tag_token("famously"), PosTag::Adv);
        assert_eq!(t.tag_token("tokenized"), PosTag::Verb);
        assert_eq!(t.tag_token("modernize"), PosTag::Verb);
        assert_eq!(t.tag_token("dangerous"), PosTag::Adj);
        assert_eq!(t.tag_token("readable"), PosTag::Adj);
        assert_eq!(t.tag_token("xylophone"), PosTag::Noun);
        // Too short for a suffix rule.
        assert_eq!(t.tag_token("fly"), PosTag::Noun);
    }

    #[test]
    fn counting() {
        assert_eq!(pos_counts(&[]), PosCounts::default());
        let c = pos_counts(&[PosTag::Noun, PosTag::Noun, PosTag::Cd]);
        assert_eq!(c.as_array(), [0, 2, 0, 0, 0, 1, 0, 0, 0]);
    }

    #[test]
    fn sentence_counts() {
        let tags = pos_tag(&tokenize("Students demonstrate and apply knowledge"));
        let c = pos_counts(&tags);
        assert_eq!((c.verbs, c.nouns, c.coord_conj), (2, 2, 1));
        assert_eq!(c.as_array().iter().sum::<u32>(), 5);
    }

    #[test]
    fn override_lexicon_replaces_embedded() {
        let t = Tagger::from_tsv("# custom\nand\tNOUN\nzork\tVERB\n").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.tag_token("and"), PosTag::Noun);
        assert_eq!(t.tag_token("Zork"), PosTag::Verb);
        assert_eq!(t.tag_token("2018"), PosTag::Cd);
        assert!(Tagger::from_tsv("bad line").is_err());
        assert!(Tagger::from_tsv("x\tNOPE").is_err());
    }
}
