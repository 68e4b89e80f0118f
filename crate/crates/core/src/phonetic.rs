//! Built-in spoken alphabet: NATO letter words, digit words and the grouped
//! number words used for call-sign numbers.

/// Letter words emitted when spelling a call-sign number, `A` through `Z`.
pub const NATO_WORDS: [&str; 26] = [
    "alfa", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliett", "kilo", "lima",
    "mike", "november", "oscar", "papa", "quebec", "romeo", "sierra", "tango", "uniform", "victor", "whiskey", "x-ray",
    "yankee", "zulu",
];

/// Digit words emitted for `0` through `9`.
pub const DIGIT_WORDS: [&str; 10] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine",
];

/// Alternate spoken form of `0`.
pub const ZERO_ALT: &str = "oh";

const TENS_WORDS: [&str; 8] = [
    "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety",
];

const LETTER_ALIASES: [(&str, char); 3] = [("alpha", 'A'), ("juliet", 'J'), ("xray", 'X')];

/// One recognized word of a spoken call-sign number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NumberWord {
    /// A single digit or letter.
    Char(char),
    /// `seventy` (unit `None`) or `seventy-two` (unit `Some(2)`).
    Tens {
        tens: u8,
        unit: Option<u8>,
    },
    Hundred,
    Thousand,
}

pub fn classify(token: &str) -> Option<NumberWord> {
    if let Some(c) = char_of(token) {
        return Some(NumberWord::Char(c));
    }
    match token {
        "hundred" => return Some(NumberWord::Hundred),
        "thousand" => return Some(NumberWord::Thousand),
        _ => {}
    }
    let (head, unit) = match token.split_once('-') {
        Some((head, tail)) => {
            let d = digit_value(tail).filter(|&d| d != 0)?;
            (head, Some(d))
        }
        None => (token, None),
    };
    let idx = TENS_WORDS.iter().position(|w| *w == head)?;
    Some(NumberWord::Tens {
        tens: idx as u8 + 2,
        unit,
    })
}

pub fn is_number_word(token: &str) -> bool {
    classify(token).is_some()
}

/// True for tokens that spell a single digit or letter.
pub fn is_digit_or_letter_word(token: &str) -> bool {
    char_of(token).is_some()
}

fn digit_value(token: &str) -> Option<u8> {
    match token {
        "oh" | "zero" => Some(0),
        "niner" => Some(9),
        _ => DIGIT_WORDS.iter().position(|w| *w == token).map(|i| i as u8),
    }
}

/// Character spelled by a digit or letter word.
pub fn char_of(token: &str) -> Option<char> {
    if let Some(d) = digit_value(token) {
        return Some((b'0' + d) as char);
    }
    if let Some(i) = NATO_WORDS.iter().position(|w| *w == token) {
        return Some((b'A' + i as u8) as char);
    }
    LETTER_ALIASES.iter().find(|(w, _)| *w == token).map(|&(_, c)| c)
}

/// Spoken alternatives for one character; `0` yields both `zero` and `oh`.
pub fn words_for_char(c: char) -> Vec<&'static str> {
    match c {
        '0' => vec![DIGIT_WORDS[0], ZERO_ALT],
        '1'..='9' => vec![DIGIT_WORDS[(c as u8 - b'0') as usize]],
        'A'..='Z' => vec![NATO_WORDS[(c as u8 - b'A') as usize]],
        _ => Vec::new(),
    }
}

/// Grouped rendering of the leading digit run of `number`, if the run is a
/// tens value (20-99) or an exact hundred or thousand. Returns the group
/// words and the index of the first character not covered by them.
pub fn grouped_prefix(number: &str) -> Option<(Vec<String>, usize)> {
    let bytes = number.as_bytes();
    let run = bytes.iter().take_while(|b| b.is_ascii_digit()).count();
    let digits = &bytes[..run];
    let words = match run {
        2 if digits[0] >= b'2' => {
            let tens = TENS_WORDS[(digits[0] - b'2') as usize];
            if digits[1] == b'0' {
                vec![tens.to_string()]
            } else {
                vec![format!("{tens}-{}", DIGIT_WORDS[(digits[1] - b'0') as usize])]
            }
        }
        3 if digits[0] != b'0' && digits[1..] == *b"00" => vec![
            DIGIT_WORDS[(digits[0] - b'0') as usize].to_string(),
            "hundred".to_string(),
        ],
        4 if digits[0] != b'0' && digits[1..] == *b"000" => vec![
            DIGIT_WORDS[(digits[0] - b'0') as usize].to_string(),
            "thousand".to_string(),
        ],
        _ => return None,
    };
    Some((words, run))
}

/// Decodes a run of number words into the characters they spell.
///
/// Group words (tens, hundred, thousand) are only accepted at the start of
/// the run. A bare tens word followed by a unit digit merges with it
/// (`seventy two` is `72`). Returns `None` when the words do not form a
/// well-structured number; length and leading-digit checks are left to the
/// caller.
pub fn decode_number(tokens: &[&str]) -> Option<String> {
    let words: Vec<NumberWord> = tokens.iter().map(|t| classify(t)).collect::<Option<_>>()?;
    let mut out = String::new();
    let mut i = 0;
    match words.first()? {
        NumberWord::Tens { tens, unit } => {
            out.push((b'0' + tens) as char);
            match (unit, words.get(1)) {
                (Some(u), _) => out.push((b'0' + u) as char),
                (None, Some(NumberWord::Char(c))) if ('1'..='9').contains(c) => {
                    out.push(*c);
                    i += 1;
                }
                (None, _) => out.push('0'),
            }
            i += 1;
        }
        NumberWord::Char(c) if c.is_ascii_digit() && *c != '0' => match words.get(1) {
            Some(NumberWord::Hundred) => {
                out.push(*c);
                out.push_str("00");
                i += 2;
            }
            Some(NumberWord::Thousand) => {
                out.push(*c);
                out.push_str("000");
                i += 2;
            }
            _ => {}
        },
        _ => {}
    }
    for word in &words[i..] {
        match word {
            NumberWord::Char(c) => out.push(*c),
            _ => return None,
        }
    }
    Some(out)
}
