//! Communicating classes and the Gantmacher canonical form.
//!
//! For a nonnegative matrix with positive diagonal, mutual reachability in
//! the positivity digraph is an equivalence relation. Renumbering indices so
//! that essential classes (those no path leaves) come first, followed by
//! inessential classes in reachability-compatible order, brings the matrix
//! to block lower triangular form with irreducible diagonal blocks.

use crate::error::{Error, Result};
use crate::linalg::{self, match_spectra};
use crate::matrix::{DenseMatrix, StochasticMatrix};
use crate::pattern::ZeroPattern;
use crate::scalar::Scalar;

/// Partition of indices into communicating classes, essential classes first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    /// Classes as sorted lists of original indices. After classification the
    /// first `essential_count` entries are the essential classes.
    pub classes: Vec<Vec<usize>>,
    /// Per-class essential flags, aligned with `classes`.
    pub essential: Vec<bool>,
    /// Number of essential classes, g.
    pub essential_count: usize,
}

impl ClassPartition {
    /// Total number of classes, p.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }

    /// Union of all inessential classes, in class order.
    pub fn inessential_indices(&self) -> Vec<usize> {
        self.classes[self.essential_count..]
            .iter()
            .flatten()
            .copied()
            .collect()
    }
}

/// The permutation, partition, and block layout of the Gantmacher form.
#[derive(Debug, Clone)]
pub struct GantmacherForm {
    /// `permutation[new] = old`: entry (i, j) of the permuted matrix is
    /// entry (permutation[i], permutation[j]) of the original.
    pub permutation: Vec<usize>,
    pub partition: ClassPartition,
    /// Class k occupies rows/columns `offsets[k]..offsets[k+1]` of the
    /// permuted matrix.
    offsets: Vec<usize>,
}

impl GantmacherForm {
    pub fn dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn class_count(&self) -> usize {
        self.partition.class_count()
    }

    pub fn essential_count(&self) -> usize {
        self.partition.essential_count
    }

    /// Row/column range of class `k` in the permuted matrix.
    pub fn block_range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }

    /// Row/column ranges of block (k, l).
    pub fn block_index(&self, k: usize, l: usize) -> (std::ops::Range<usize>, std::ops::Range<usize>) {
        (self.block_range(k), self.block_range(l))
    }

    /// Apply the permutation to a stochastic matrix.
    pub fn permute<F: Scalar>(&self, a: &StochasticMatrix<F>) -> Result<StochasticMatrix<F>> {
        if a.n() != self.dim() {
            return Err(Error::FormMismatch {
                reason: format!("matrix dimension {} vs form dimension {}", a.n(), self.dim()),
            });
        }
        Ok(a.permute(&self.permutation))
    }

    /// Apply the permutation to a pattern.
    pub fn permute_pattern(&self, p: &ZeroPattern) -> Result<ZeroPattern> {
        if p.n() != self.dim() {
            return Err(Error::FormMismatch {
                reason: format!("pattern dimension {} vs form dimension {}", p.n(), self.dim()),
            });
        }
        let n = p.n();
        let mut mask = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                mask[i * n + j] = p.get(self.permutation[i], self.permutation[j]);
            }
        }
        Ok(ZeroPattern::from_mask(n, mask))
    }
}

fn pattern_adjacency(p: &ZeroPattern) -> Vec<Vec<usize>> {
    let n = p.n();
    (0..n)
        .map(|i| (0..n).filter(|&j| p.get(i, j)).collect())
        .collect()
}

/// Tarjan strongly connected components of the pattern digraph. Requires a
/// positive diagonal so every index self-communicates and the path relation
/// is reflexive.
pub fn communicating_classes(p: &ZeroPattern) -> Result<Vec<Vec<usize>>> {
    for i in 0..p.n() {
        if !p.get(i, i) {
            return Err(Error::MissingPositiveDiagonal { index: i });
        }
    }
    let graph = pattern_adjacency(p);
    let mut classes = tarjan_scc(&graph);
    for class in &mut classes {
        class.sort_unstable();
    }
    Ok(classes)
}

struct TarjanState {
    index: usize,
    stack: Vec<usize>,
    on_stack: Vec<bool>,
    idx: Vec<Option<usize>>,
    low: Vec<usize>,
    comps: Vec<Vec<usize>>,
}

fn tarjan_scc(graph: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = graph.len();
    let mut state = TarjanState {
        index: 0,
        stack: Vec::new(),
        on_stack: vec![false; n],
        idx: vec![None; n],
        low: vec![0; n],
        comps: Vec::new(),
    };
    for v in 0..n {
        if state.idx[v].is_none() {
            strongconnect(v, graph, &mut state);
        }
    }
    state.comps
}

fn strongconnect(v: usize, graph: &[Vec<usize>], state: &mut TarjanState) {
    state.idx[v] = Some(state.index);
    state.low[v] = state.index;
    state.index += 1;
    state.stack.push(v);
    state.on_stack[v] = true;

    for &w in &graph[v] {
        if state.idx[w].is_none() {
            strongconnect(w, graph, state);
            state.low[v] = state.low[v].min(state.low[w]);
        } else if state.on_stack[w] {
            state.low[v] = state.low[v].min(state.idx[w].unwrap());
        }
    }

    if state.low[v] == state.idx[v].unwrap() {
        let mut comp = Vec::new();
        loop {
            let w = state.stack.pop().expect("stack underflow");
            state.on_stack[w] = false;
            comp.push(w);
            if w == v {
                break;
            }
        }
        state.comps.push(comp);
    }
}

/// Classify classes as essential (no edge leaves the class) or inessential,
/// order essential classes first, and count g. Essential classes are sorted
/// by smallest original index; inessential classes by topological tier
/// (length of the longest downstream chain), ties by smallest index.
pub fn classify_essential(classes: Vec<Vec<usize>>, p: &ZeroPattern) -> ClassPartition {
    let n = p.n();
    let ncls = classes.len();
    let mut class_of = vec![usize::MAX; n];
    for (cid, class) in classes.iter().enumerate() {
        for &v in class {
            class_of[v] = cid;
        }
    }

    // Condensation edges: class -> classes it reaches in one step.
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ncls];
    for i in 0..n {
        for j in 0..n {
            if p.get(i, j) && class_of[i] != class_of[j] {
                succ[class_of[i]].push(class_of[j]);
            }
        }
    }
    for out in &mut succ {
        out.sort_unstable();
        out.dedup();
    }

    // Tier 0 for sinks (essential classes); otherwise one more than the
    // deepest successor, so reachability implies a strictly larger tier.
    let mut tier = vec![usize::MAX; ncls];
    fn tier_of(c: usize, succ: &[Vec<usize>], tier: &mut [usize]) -> usize {
        if tier[c] != usize::MAX {
            return tier[c];
        }
        let t = succ[c]
            .iter()
            .map(|&d| tier_of(d, succ, tier) + 1)
            .max()
            .unwrap_or(0);
        tier[c] = t;
        t
    }
    for c in 0..ncls {
        tier_of(c, &succ, &mut tier);
    }

    let mut order: Vec<usize> = (0..ncls).collect();
    order.sort_by_key(|&c| {
        let essential = succ[c].is_empty();
        let min_index = classes[c][0];
        (!essential, tier[c], min_index)
    });

    let ordered: Vec<Vec<usize>> = order.iter().map(|&c| classes[c].clone()).collect();
    let essential_flags: Vec<bool> = order.iter().map(|&c| succ[c].is_empty()).collect();
    let g = essential_flags.iter().filter(|&&b| b).count();

    ClassPartition {
        classes: ordered,
        essential: essential_flags,
        essential_count: g,
    }
}

/// Gantmacher form of a pattern with positive diagonal.
pub fn gantmacher_form_of_pattern(p: &ZeroPattern) -> Result<GantmacherForm> {
    let classes = communicating_classes(p)?;
    let partition = classify_essential(classes, p);
    let mut permutation = Vec::with_capacity(p.n());
    let mut offsets = vec![0usize];
    for class in &partition.classes {
        permutation.extend_from_slice(class);
        offsets.push(permutation.len());
    }
    Ok(GantmacherForm {
        permutation,
        partition,
        offsets,
    })
}

/// Gantmacher form of a stochastic matrix with positive diagonal: the
/// simultaneous row/column permutation bringing it to block lower triangular
/// shape with irreducible diagonal blocks.
pub fn gantmacher_form<F: Scalar>(a: &StochasticMatrix<F>, eps_z: F) -> Result<GantmacherForm> {
    gantmacher_form_of_pattern(&a.pattern(eps_z))
}

/// The (k, l) block of the permuted matrix, k >= l. Blocks above the
/// diagonal are structurally zero and may not be requested.
pub fn extract_block<F: Scalar>(
    a: &StochasticMatrix<F>,
    form: &GantmacherForm,
    k: usize,
    l: usize,
) -> Result<DenseMatrix<F>> {
    if k < l {
        return Err(Error::BlockAboveDiagonal { k, l });
    }
    if a.n() != form.dim() {
        return Err(Error::FormMismatch {
            reason: format!("matrix dimension {} vs form dimension {}", a.n(), form.dim()),
        });
    }
    let permuted = form.permute(a)?;
    let (ri, ci) = form.block_index(k, l);
    Ok(permuted.as_dense().block(ri, ci))
}

/// Check that the spectrum of the full matrix equals the multiset union of
/// the diagonal-block spectra, matched within `tol`.
pub fn spectrum_union_check<F: Scalar>(
    a: &StochasticMatrix<F>,
    form: &GantmacherForm,
    tol: F,
) -> Result<bool> {
    let full = linalg::eigenvalues(a.as_dense())?;
    let permuted = form.permute(a)?;
    let mut union = Vec::with_capacity(a.n());
    for k in 0..form.class_count() {
        let range = form.block_range(k);
        let block = permuted.as_dense().block(range.clone(), range);
        union.extend(linalg::eigenvalues(&block)?);
    }
    Ok(match_spectra(&full, &union).map_or(false, |worst| worst <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sm(rows: &[&[f64]]) -> StochasticMatrix<f64> {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        StochasticMatrix::validate(&rows, 1e-10, false).unwrap()
    }

    fn chain3() -> StochasticMatrix<f64> {
        sm(&[&[1.0, 0.0, 0.0], &[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5]])
    }

    #[test]
    fn identity_pattern_gives_singletons_all_essential() {
        let p = ZeroPattern::diagonal(4);
        let classes = communicating_classes(&p).unwrap();
        assert_eq!(classes.len(), 4);
        let part = classify_essential(classes, &p);
        assert_eq!(part.essential_count, 4);
        assert_eq!(part.class_count(), 4);
        assert!(part.essential.iter().all(|&b| b));
    }

    #[test]
    fn all_true_pattern_is_one_essential_class() {
        let p = ZeroPattern::all_true(3);
        let classes = communicating_classes(&p).unwrap();
        assert_eq!(classes.len(), 1);
        let part = classify_essential(classes, &p);
        assert_eq!(part.essential_count, 1);
        assert_eq!(part.classes[0], vec![0, 1, 2]);
    }

    #[test]
    fn missing_diagonal_is_rejected() {
        let p = ZeroPattern::from_rows(&[vec![true, true], vec![true, false]]);
        assert!(matches!(
            communicating_classes(&p),
            Err(Error::MissingPositiveDiagonal { index: 1 })
        ));
    }

    #[test]
    fn chain_classes_and_essential_flags() {
        // 1 <- 2 <- 3 (zero-based 0 <- 1 <- 2): three singleton classes,
        // only the absorbing first one essential.
        let a = chain3();
        let p = a.pattern(1e-12);
        let classes = communicating_classes(&p).unwrap();
        assert_eq!(classes.len(), 3);
        let part = classify_essential(classes, &p);
        assert_eq!(part.essential_count, 1);
        assert_eq!(part.classes, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(part.essential, vec![true, false, false]);
    }

    #[test]
    fn chain_form_is_identity_permutation() {
        let a = chain3();
        let form = gantmacher_form(&a, 1e-12).unwrap();
        assert_eq!(form.permutation, vec![0, 1, 2]);
        // Block lower triangularity of the permuted matrix.
        let permuted = form.permute(&a).unwrap();
        for k in 0..3 {
            for l in (k + 1)..3 {
                assert_eq!(permuted.get(k, l), 0.0);
            }
        }
        // The (1, 0) block reads off the single coupling weight.
        let block = extract_block(&a, &form, 1, 0).unwrap();
        assert_eq!(block.nrows(), 1);
        assert_eq!(block.get(0, 0), 0.5);
        // A structurally-zero nondiagonal block.
        let zero_block = extract_block(&a, &form, 2, 0).unwrap();
        assert_eq!(zero_block.get(0, 0), 0.0);
    }

    #[test]
    fn essential_classes_come_first() {
        // Index 0 reaches index 2; classes {1} and {2} are essential.
        let a = sm(&[&[0.5, 0.0, 0.5], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let form = gantmacher_form(&a, 1e-12).unwrap();
        assert_eq!(form.essential_count(), 2);
        assert_eq!(form.partition.classes, vec![vec![1], vec![2], vec![0]]);
        assert_eq!(form.permutation, vec![1, 2, 0]);
        let permuted = form.permute(&a).unwrap();
        for k in 0..3 {
            for l in (k + 1)..3 {
                assert_eq!(permuted.get(k, l), 0.0);
            }
        }
    }

    #[test]
    fn positive_matrix_single_block() {
        let a = sm(&[&[0.6, 0.2, 0.2], &[0.1, 0.8, 0.1], &[0.3, 0.3, 0.4]]);
        let form = gantmacher_form(&a, 1e-12).unwrap();
        assert_eq!(form.class_count(), 1);
        assert_eq!(form.essential_count(), 1);
        let block = extract_block(&a, &form, 0, 0).unwrap();
        assert_eq!(block.nrows(), 3);
    }

    #[test]
    fn block_above_diagonal_is_refused() {
        let a = chain3();
        let form = gantmacher_form(&a, 1e-12).unwrap();
        assert!(matches!(
            extract_block(&a, &form, 0, 1),
            Err(Error::BlockAboveDiagonal { k: 0, l: 1 })
        ));
    }

    #[test]
    fn spectrum_union_identity_and_triangular() {
        let id = StochasticMatrix::<f64>::identity(3);
        let form = gantmacher_form(&id, 1e-12).unwrap();
        assert!(spectrum_union_check(&id, &form, 1e-8).unwrap());

        // [[1, 0], [0.5, 0.5]]: spectra {1} and {0.5}.
        let a = sm(&[&[1.0, 0.0], &[0.5, 0.5]]);
        let form = gantmacher_form(&a, 1e-12).unwrap();
        assert!(spectrum_union_check(&a, &form, 1e-8).unwrap());
    }

    #[test]
    fn inessential_class_reaches_an_earlier_class() {
        let a = chain3();
        let form = gantmacher_form(&a, 1e-12).unwrap();
        let permuted = form.permute(&a).unwrap();
        let p = permuted.pattern(1e-12);
        for k in form.essential_count()..form.class_count() {
            let rows = form.block_range(k);
            let has_outgoing = rows.clone().any(|i| {
                (0..form.offsets[k]).any(|j| p.get(i, j))
            });
            assert!(has_outgoing, "inessential class {k} must reach an earlier class");
        }
    }

    #[test]
    fn form_is_idempotent_on_permuted_matrices() {
        let a = sm(&[
            &[0.5, 0.0, 0.5, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.25, 0.25, 0.25, 0.25],
        ]);
        let form = gantmacher_form(&a, 1e-12).unwrap();
        let permuted = form.permute(&a).unwrap();
        let again = gantmacher_form(&permuted, 1e-12).unwrap();
        assert_eq!(
            form.partition.class_sizes(),
            again.partition.class_sizes()
        );
        assert_eq!(form.essential_count(), again.essential_count());
        // Re-permuting keeps block lower triangularity.
        let twice = again.permute(&permuted).unwrap();
        let n = twice.n();
        let p = twice.pattern(1e-12);
        for k in 0..again.class_count() {
            for l in (k + 1)..again.class_count() {
                let (ri, ci) = again.block_index(k, l);
                for i in ri.clone() {
                    for j in ci.clone() {
                        assert!(!p.get(i, j), "entry ({i}, {j}) of {n}x{n} above diagonal");
                    }
                }
            }
        }
    }
}
