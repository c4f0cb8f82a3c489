/// What a name refers to; decides the canonicalization rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameKind {
    Author,
    Institution,
}

/// Canonical spelling of an author or institution name.
///
/// Institutions only get whitespace collapsed. Authors are rewritten to
/// `Surname, Given`: whitespace collapsed, single-case input (all upper or
/// all lower) recased word by word with initials kept upper-case, and
/// trailing periods dropped when the given name is a single block of
/// initials (`Tao, F.` becomes `Tao, F`; `Gao, Robert X.` keeps its period).
pub fn canonicalize_name(raw: &str, kind: NameKind) -> String {
    let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    match kind {
        NameKind::Institution => collapsed,
        NameKind::Author => canonical_author(&collapsed),
    }
}

fn canonical_author(name: &str) -> String {
    let (surname, given) = match name.split_once(',') {
        Some((s, g)) => (s.trim().to_owned(), g.trim().to_owned()),
        None => (name.trim().to_owned(), String::new()),
    };
    let has_upper = name.chars().any(char::is_uppercase);
    let has_lower = name.chars().any(char::is_lowercase);
    let single_case = !(has_upper && has_lower);

    let (surname, given) = if single_case {
        let surname = surname.split(' ').map(title_case).collect::<Vec<_>>().join(" ");
        let given = given
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(|t| {
                if is_initials(t) {
                    t.to_uppercase()
                } else {
                    title_case(t)
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        (surname, given)
    } else {
        (surname, given)
    };

    if given.is_empty() {
        return surname.trim_end_matches(['.', ' ']).to_owned();
    }
    let stripped = given.trim_end_matches(['.', ' ']);
    let given = if !given.contains(' ') && is_initials(stripped) {
        stripped.to_owned()
    } else {
        given
    };
    if given.is_empty() {
        surname
    } else {
        format!("{surname}, {given}")
    }
}

fn is_initials(token: &str) -> bool {
    let letters: Vec<char> = token.chars().filter(|c| c.is_alphabetic()).collect();
    if letters.is_empty() || token.chars().any(|c| !(c.is_alphabetic() || c == '.' || c == '-')) {
        return false;
    }
    if token.contains('.') || letters.len() == 1 {
        return letters.len() <= 4;
    }
    letters.len() <= 3
        && letters
            .iter()
            .all(|c| !matches!(c.to_ascii_lowercase(), 'a' | 'e' | 'i' | 'o' | 'u' | 'y'))
}

/// Upper-cases the first letter of the word and of every part after a
/// hyphen or apostrophe; lower-cases the rest.
fn title_case(word: &str) -> String {
    let mut out = String::with_capacity(word.len());
    let mut start = true;
    for c in word.chars() {
        if start {
            out.extend(c.to_uppercase());
        } else {
            out.extend(c.to_lowercase());
        }
        start = matches!(c, '-' | '\'' | '.');
    }
    out
}
