//! Right-angled Artin groups: reduced words up to commutation, canonicalised
//! to the lexicographically least word of the trace.

use crate::word::{ElementWord, Letter};

/// `commute[g][h]` is true iff `g` and `h` commute (and `g != h`).
pub fn normalize(commute: &[Vec<bool>], w: &ElementWord) -> ElementWord {
    let mut reduced: Vec<Letter> = Vec::with_capacity(w.len());
    for l in w.letters() {
        push_reduced(commute, &mut reduced, l);
    }
    ElementWord::from_letters(lex_least(commute, reduced))
}

fn push_reduced(commute: &[Vec<bool>], word: &mut Vec<Letter>, l: Letter) {
    let g = l.gen();
    for i in (0..word.len()).rev() {
        let x = word[i];
        if x.gen() == g {
            if x == l.inverse() {
                word.remove(i);
                return;
            }
            break;
        }
        if !commute[g][x.gen()] {
            break;
        }
    }
    word.push(l);
}

/// Repeatedly emit the least letter that can be shuffled to the front.
fn lex_least(commute: &[Vec<bool>], mut rest: Vec<Letter>) -> Vec<Letter> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            let l = rest[i];
            let free = rest[..i]
                .iter()
                .all(|x| x.gen() != l.gen() && commute[l.gen()][x.gen()]);
            if free && best.map_or(true, |b| l < rest[b]) {
                best = Some(i);
            }
        }
        let i = best.expect("the first letter is always movable");
        out.push(rest.remove(i));
    }
    out
}
