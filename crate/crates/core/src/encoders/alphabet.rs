//! The 44-symbol utterance alphabet: 40 ARPAbet phonemes in alphabetical order
//! (the 39 CMU-dictionary phonemes plus the schwa `AX`), followed by the four
//! pause/intonation signs.

pub const PHONEMES: [&str; 44] = [
    "AA", "AE", "AH", "AO", "AW", "AX", "AY", "B", "CH", "D", "DH", "EH", "ER", "EY", "F", "G", "HH", "IH", "IY", "JH",
    "K", "L", "M", "N", "NG", "OW", "OY", "P", "R", "S", "SH", "T", "TH", "UH", "UW", "V", "W", "Y", "Z", "ZH", "SIL",
    "PER", "EXM", "QUM",
];

pub const SIL: usize = 40;
pub const PER: usize = 41;
pub const EXM: usize = 42;
pub const QUM: usize = 43;

pub fn index_of(symbol: &str) -> Option<usize> {
    PHONEMES.iter().position(|&p| p == symbol)
}

/// Whether the symbol ends an utterance (period, exclamation, question).
pub fn is_terminal(index: usize) -> bool {
    matches!(index, PER | EXM | QUM)
}

/// Punctuation rendered for a terminal sign.
pub fn terminal_mark(index: usize) -> Option<char> {
    match index {
        PER => Some('.'),
        EXM => Some('!'),
        QUM => Some('?'),
        _ => None,
    }
}

pub fn terminal_for_mark(mark: char) -> Option<usize> {
    match mark {
        '.' => Some(PER),
        '!' => Some(EXM),
        '?' => Some(QUM),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_has_44_unique_symbols() {
        let mut s = PHONEMES.to_vec();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 44);
        assert_eq!(index_of("PER"), Some(PER));
        assert_eq!(index_of("AA"), Some(0));
        assert_eq!(index_of("ZH"), Some(39));
        assert_eq!(index_of("XX"), None);
    }
}
