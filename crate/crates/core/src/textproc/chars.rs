/// Character alphabet for character-level models: `a`-`z`, `0`-`9`, space.
pub const ALPHABET: &str = "abcdefghijklmnopqrstuvwxyz0123456789 ";
pub const ALPHABET_SIZE: usize = 37;

const SPACE: usize = 36;

/// Lowercases `text` and maps it into alphabet indices. Characters outside
/// the alphabet are dropped, any whitespace becomes a space, and space runs
/// collapse to one with leading and trailing spaces removed.
pub fn normalize_chars(text: &str) -> Vec<usize> {
    let mut out = Vec::with_capacity(text.len());
    for c in text.chars().flat_map(char::to_lowercase) {
        let idx = match c {
            'a'..='z' => c as usize - 'a' as usize,
            '0'..='9' => 26 + (c as usize - '0' as usize),
            c if c.is_whitespace() => SPACE,
            _ => continue,
        };
        if idx == SPACE && out.last().is_none_or(|&l| l == SPACE) {
            continue;
        }
        out.push(idx);
    }
    if out.last() == Some(&SPACE) {
        out.pop();
    }
    out
}

pub fn alphabet_char(index: usize) -> Option<char> {
    ALPHABET.as_bytes().get(index).map(|&b| b as char)
}
