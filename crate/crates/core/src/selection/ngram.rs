use std::collections::BTreeSet;

use crate::types::ContractError;

/// Distinct n-token tuples of a text, lowercased and split on whitespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramSet {
    pub n: usize,
    pub grams: BTreeSet<Vec<String>>,
}

impl NGramSet {
    pub fn len(&self) -> usize {
        self.grams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grams.is_empty()
    }
}

/// Texts shorter than `n` tokens give the empty set.
pub fn ngram_set(text: &str, n: usize) -> Result<NGramSet, ContractError> {
    if n == 0 {
        return Err(ContractError::invalid("n", "must be >= 1"));
    }
    let tokens: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
    let grams = tokens.windows(n).map(<[String]>::to_vec).collect();
    Ok(NGramSet { n, grams })
}

/// Number of n-grams the two sets share.
pub fn ngram_similarity(a: &NGramSet, b: &NGramSet) -> Result<usize, ContractError> {
    if a.n != b.n {
        return Err(ContractError::invalid(
            "n",
            format!("cannot compare {}-grams with {}-grams", a.n, b.n),
        ));
    }
    Ok(a.grams.intersection(&b.grams).count())
}
