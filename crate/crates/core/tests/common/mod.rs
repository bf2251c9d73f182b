use std::collections::HashMap;

use floerkit::labels::{LabelClass, LabelGroup};

/// Counts trees as prefix words over leaves and decorated vertices, memoized
/// on the state of the word reader.
pub fn brute_force_count(k: usize, beta: &LabelClass, labels: &LabelGroup) -> usize {
    let subs = labels.sub_classes(beta);
    let max_arity = k + beta.size() as usize;
    #[allow(clippy::too_many_arguments)]
    fn go(
        need: usize,
        leaves: usize,
        used: &LabelClass,
        first: bool,
        k: usize,
        beta: &LabelClass,
        subs: &[LabelClass],
        max_arity: usize,
        memo: &mut HashMap<(usize, usize, LabelClass, bool), usize>,
    ) -> usize {
        if need == 0 {
            return usize::from(leaves == k && used == beta);
        }
        let key = (need, leaves, used.clone(), first);
        if let Some(n) = memo.get(&key) {
            return *n;
        }
        let mut n = 0;
        if !first && leaves < k {
            n += go(
                need - 1,
                leaves + 1,
                used,
                false,
                k,
                beta,
                subs,
                max_arity,
                memo,
            );
        }
        for b0 in subs {
            let next = used.add(b0);
            if !next.le(beta) {
                continue;
            }
            let min = if b0.is_zero() { 2 } else { 0 };
            for arity in min..=max_arity {
                // Each open slot still needs a leaf or a nonzero class.
                let open = need - 1 + arity;
                let left = (k - leaves) + beta.checked_sub(&next).unwrap().size() as usize;
                if open > left + left {
                    break;
                }
                n += go(open, leaves, &next, false, k, beta, subs, max_arity, memo);
            }
        }
        memo.insert(key, n);
        n
    }
    if k == 1 && beta.is_zero() {
        return 0;
    }
    go(
        1,
        0,
        &labels.zero(),
        true,
        k,
        beta,
        &subs,
        max_arity,
        &mut HashMap::new(),
    )
}
