//! Small string helpers shared by ingest, summarize and consolidate.

/// Trims and collapses every run of whitespace (including newlines) to one space.
pub fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// `"diffusion"` -> `"Diffusion"`, `"LLMS"` -> `"Llms"`.
pub fn title_case(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars.flat_map(char::to_lowercase)).collect(),
        None => String::new(),
    }
}

/// Splits on whitespace and strips leading/trailing punctuation from each token.
/// Internal hyphens and apostrophes survive (`"vision-language"` stays whole).
pub fn word_tokens(s: &str) -> impl Iterator<Item = &str> {
    s.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|t| !t.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapses() {
        assert_eq!(collapse_whitespace("  Diffusion \n\t Models "), "Diffusion Models");
        assert_eq!(collapse_whitespace(""), "");
    }

    #[test]
    fn tokens_strip_punctuation() {
        let toks: Vec<_> = word_tokens("(Vision-Language) models, 3D!").collect();
        assert_eq!(toks, ["Vision-Language", "models", "3D"]);
    }

    #[test]
    fn title_cases() {
        assert_eq!(title_case("diffusion"), "Diffusion");
        assert_eq!(title_case("LLMS"), "Llms");
    }
}
