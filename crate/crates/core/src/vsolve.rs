//! Randomized incremental solver for violator spaces.
//!
//! The algorithm inserts constraints in a (pseudo-)random order and recurses
//! when an insertion violates the current basis; the recursive call receives
//! the whole witness set W plus the violated basis and the violating
//! constraint, not the shrunken basis. Recursion depth is bounded by the
//! combinatorial dimension.
//!
//! Two sequence modes are provided: explicitly stored per-level permutations
//! (the linear-space reference) and index-on-demand pseudo-random sequences
//! with a per-level verification sweep and restart.

use crate::error::{Error, Result};
use crate::prg::{self, Entropy, PrgSpec};
use crate::workspace::Workspace;
use rand::seq::SliceRandom;

/// Abstract constraint system: violation test against a cached basis cell and
/// small-set basis computation. Implementations must satisfy consistency,
/// locality and monotonicity; `check_violator_axioms` verifies that on small
/// instances by brute force.
pub trait ViolatorInstance {
    /// Cached geometry (or value) of a basis, used by violation tests.
    type Cell;

    fn constraint_count(&self) -> usize;
    /// Combinatorial dimension d: maximum basis size.
    fn dim(&self) -> usize;
    /// Canonical basis of a set of at most (d+1)^2 constraints, with its cell.
    /// Ties are broken toward the lexicographically smallest id set.
    fn basis_of(&self, ids: &[usize], ws: &mut Workspace) -> Result<(Vec<usize>, Self::Cell)>;
    fn violates(&self, c: usize, cell: &Self::Cell) -> bool;

    /// Words to charge for holding a cell; collections only.
    fn cell_words(&self, _cell: &Self::Cell) -> usize {
        1
    }
    /// Work units of one violation test (used as the operation clock).
    fn violation_cost(&self, _c: usize) -> u64 {
        1
    }
    /// Work units of one basis computation.
    fn basis_cost(&self, _ids: &[usize]) -> u64 {
        1
    }
}

/// Canonical sorted basis, at most d constraint ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    pub constraints: Vec<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct SolveStats {
    pub violation_tests: u64,
    pub basis_computations: u64,
    pub prg_restarts: u64,
    pub max_recursion_depth: u32,
    pub peak_workspace_words: u64,
    /// violation tests weighted by per-constraint cost
    pub violation_work: u64,
    /// basis computations weighted by input complexity
    pub basis_work: u64,
}

impl SolveStats {
    /// Operation-count clock used by the scaling criteria.
    pub fn clock(&self) -> u64 {
        self.violation_work + self.basis_work
    }
}

/// Observer events for replaying the recursion in tests.
#[derive(Debug, Clone)]
pub enum SolveEvent {
    Recurse { level: usize, trigger: usize },
    BasisComputed { level: usize, basis: Vec<usize> },
    LevelDone { level: usize },
}

#[derive(Debug, Clone)]
pub struct PrgOptions {
    /// Polynomial degree Delta; defaults to 6d + 10.
    pub degree: Option<u32>,
    /// Copy count c'; defaults to 8(5 + ceil(ln d))^2.
    pub copies: Option<u32>,
    pub restart_cap: usize,
}

impl Default for PrgOptions {
    fn default() -> Self {
        PrgOptions {
            degree: None,
            copies: None,
            restart_cap: 64,
        }
    }
}

enum LevelSeq {
    Explicit(Vec<u64>),
    Perm(Vec<u64>),
    Prg(PrgSpec),
}

impl LevelSeq {
    fn len(&self) -> u64 {
        match self {
            LevelSeq::Explicit(v) | LevelSeq::Perm(v) => v.len() as u64,
            LevelSeq::Prg(s) => s.seq_len(),
        }
    }
    /// Local value at 1-based position; None marks an out-of-range hole.
    fn raw_at(&self, pos: u64) -> Option<u64> {
        match self {
            LevelSeq::Explicit(v) | LevelSeq::Perm(v) => Some(v[(pos - 1) as usize]),
            LevelSeq::Prg(s) => {
                let v = prg::value_at(s, pos).expect("position in range");
                (v <= s.range_limit).then_some(v)
            }
        }
    }
    fn words(&self) -> usize {
        match self {
            LevelSeq::Explicit(v) | LevelSeq::Perm(v) => v.len(),
            LevelSeq::Prg(s) => s.words(),
        }
    }
}

enum Mode {
    Permutation,
    Prg { degree: u32, copies: u32 },
}

struct Levels {
    mode: Mode,
    entropy: Entropy,
    /// (sequence, universe size m, epoch) per active level
    stack: Vec<(LevelSeq, u64, u64)>,
}

impl Levels {
    fn begin(&mut self, level: usize, m: u64, epoch: u64, ws: &mut Workspace) -> Result<()> {
        debug_assert_eq!(self.stack.len(), level);
        let e = self.entropy.fork(level as u64).fork(epoch);
        let seq = match &self.mode {
            Mode::Permutation => {
                let mut v: Vec<u64> = (1..=m).collect();
                v.shuffle(&mut e.rng());
                LevelSeq::Perm(v)
            }
            Mode::Prg { degree, copies } => LevelSeq::Prg(prg::fresh_spec(m, *degree, *copies, e)),
        };
        ws.charge(seq.words(), "level sequence")?;
        self.stack.push((seq, m, epoch));
        Ok(())
    }

    fn end(&mut self, level: usize, ws: &mut Workspace) {
        debug_assert_eq!(self.stack.len(), level + 1);
        let (seq, _, _) = self.stack.pop().unwrap();
        ws.release(seq.words());
    }

    /// Resolve a local constraint of `level`'s universe down to a global
    /// 0-based id; None if the chain passes through a hole.
    fn resolve(&self, level: usize, mut u: u64) -> Option<usize> {
        for lev in (0..level).rev() {
            u = self.stack[lev].0.raw_at(u)?;
        }
        Some((u - 1) as usize)
    }
}

struct Engine<'a, I: ViolatorInstance> {
    inst: &'a I,
    levels: Levels,
    stats: SolveStats,
    ws: &'a mut Workspace,
    events: Option<&'a mut Vec<SolveEvent>>,
    restart_cap: usize,
    sweep: bool,
    witness: Vec<usize>,
}

impl<'a, I: ViolatorInstance> Engine<'a, I> {
    fn emit(&mut self, ev: SolveEvent) {
        if let Some(sink) = self.events.as_deref_mut() {
            sink.push(ev);
        }
    }

    fn compute_basis(&mut self, level: usize) -> Result<(Vec<usize>, I::Cell)> {
        self.stats.basis_computations += 1;
        self.stats.basis_work += self.inst.basis_cost(&self.witness);
        let witness = std::mem::take(&mut self.witness);
        let r = self.inst.basis_of(&witness, self.ws);
        self.witness = witness;
        let (basis, cell) = r?;
        let d = self.inst.dim();
        if basis.len() > d {
            return Err(Error::Internal(format!(
                "basis size {} exceeds dimension {}",
                basis.len(),
                d
            )));
        }
        self.ws.charge(self.inst.cell_words(&cell), "basis cell")?;
        self.emit(SolveEvent::BasisComputed {
            level,
            basis: basis.clone(),
        });
        Ok((basis, cell))
    }

    fn drop_cell(&mut self, cell: I::Cell) {
        self.ws.release(self.inst.cell_words(&cell));
        drop(cell);
    }

    fn test(&mut self, c: usize, cell: &I::Cell) -> bool {
        self.stats.violation_tests += 1;
        self.stats.violation_work += self.inst.violation_cost(c);
        self.inst.violates(c, cell)
    }

    /// One recursion level over a universe of m constraints. The first level
    /// may use an explicit sequence (for tests); deeper levels draw their own.
    fn run_level(
        &mut self,
        level: usize,
        m: u64,
        explicit: Option<Vec<u64>>,
    ) -> Result<(Vec<usize>, I::Cell)> {
        let d = self.inst.dim();
        if level > d {
            return Err(Error::DepthExceeded { dim: d });
        }
        self.stats.max_recursion_depth = self.stats.max_recursion_depth.max(level as u32);

        let mut epoch = 0u64;
        match explicit {
            Some(seq) => {
                self.ws.charge(seq.len(), "explicit sequence")?;
                self.levels.stack.push((LevelSeq::Explicit(seq), m, 0));
            }
            None => self.levels.begin(level, m, epoch, self.ws)?,
        }

        let result = 'restart: loop {
            let (mut basis, mut cell) = match self.compute_basis(level) {
                Ok(bc) => bc,
                Err(e) => break 'restart Err(e),
            };
            let len = self.levels.stack[level].0.len();
            let mut pos = 1u64;
            while pos <= len {
                let local = match self.levels.stack[level].0.raw_at(pos) {
                    Some(v) => v,
                    None => {
                        pos += 1;
                        continue;
                    }
                };
                let gid = match self.levels.resolve(level, local) {
                    Some(g) => g,
                    None => {
                        pos += 1;
                        continue;
                    }
                };
                if self.test(gid, &cell) {
                    self.emit(SolveEvent::Recurse {
                        level: level + 1,
                        trigger: gid,
                    });
                    let saved = self.witness.len();
                    for b in basis {
                        push_unique(&mut self.witness, b);
                    }
                    push_unique(&mut self.witness, gid);
                    if self.witness.len() > d * (d + 1) {
                        break 'restart Err(Error::Internal(format!(
                            "witness set grew to {} > d(d+1)",
                            self.witness.len()
                        )));
                    }
                    self.drop_cell(cell);
                    let sub = self.run_level(level + 1, pos, None);
                    self.witness.truncate(saved);
                    match sub {
                        Ok((b, c)) => {
                            basis = b;
                            cell = c;
                        }
                        Err(e) => break 'restart Err(e),
                    }
                }
                pos += 1;
            }

            // verification sweep over this level's universe
            let mut failed = false;
            if self.sweep {
                for u in 1..=m {
                    let gid = match self.levels.resolve(level, u) {
                        Some(g) => g,
                        None => continue,
                    };
                    if self.test(gid, &cell) {
                        failed = true;
                        break;
                    }
                }
            }
            if !failed {
                break 'restart Ok((basis, cell));
            }
            self.drop_cell(cell);
            self.stats.prg_restarts += 1;
            epoch += 1;
            if epoch as usize >= self.restart_cap {
                break 'restart Err(Error::RestartCap(self.restart_cap));
            }
            self.levels.end(level, self.ws);
            self.levels.begin(level, m, epoch, self.ws)?;
        };

        self.levels.end(level, self.ws);
        self.emit(SolveEvent::LevelDone { level });
        result
    }
}

fn push_unique(v: &mut Vec<usize>, x: usize) {
    if !v.contains(&x) {
        v.push(x);
    }
}

fn finish<I: ViolatorInstance>(
    engine: Engine<'_, I>,
    r: Result<(Vec<usize>, I::Cell)>,
) -> Result<(Basis, I::Cell, SolveStats)> {
    let (mut ids, cell) = r?;
    ids.sort_unstable();
    let mut stats = engine.stats;
    stats.peak_workspace_words = engine.ws.peak();
    // balance: the top cell is handed to the caller
    engine.ws.release(engine.inst.cell_words(&cell));
    Ok((Basis { constraints: ids }, cell, stats))
}

/// Core recursion on an explicit top-level sequence of global constraint ids,
/// with `witness` forced into every basis computation. Deeper levels draw
/// seeded permutations.
pub fn solve_vs<I: ViolatorInstance>(
    inst: &I,
    witness: &[usize],
    sequence: &[usize],
    seed: u64,
    ws: &mut Workspace,
) -> Result<(Basis, I::Cell, SolveStats)> {
    let mut engine = Engine {
        inst,
        levels: Levels {
            mode: Mode::Permutation,
            entropy: Entropy::new(seed).fork(0xe5),
            stack: Vec::new(),
        },
        stats: SolveStats::default(),
        ws,
        events: None,
        restart_cap: 64,
        sweep: false,
        witness: witness.to_vec(),
    };
    let seq: Vec<u64> = sequence.iter().map(|&c| c as u64 + 1).collect();
    let m = inst.constraint_count() as u64;
    let r = engine.run_level(0, m, Some(seq));
    finish(engine, r)
}

/// Reference mode: uniformly random, explicitly stored permutation per level.
pub fn solve_permutation<I: ViolatorInstance>(
    inst: &I,
    seed: u64,
    ws: &mut Workspace,
) -> Result<(Basis, I::Cell, SolveStats)> {
    solve_permutation_observed(inst, seed, ws, None)
}

pub fn solve_permutation_observed<I: ViolatorInstance>(
    inst: &I,
    seed: u64,
    ws: &mut Workspace,
    events: Option<&mut Vec<SolveEvent>>,
) -> Result<(Basis, I::Cell, SolveStats)> {
    let n = inst.constraint_count() as u64;
    let mut engine = Engine {
        inst,
        levels: Levels {
            mode: Mode::Permutation,
            entropy: Entropy::new(seed).fork(0x9e),
            stack: Vec::new(),
        },
        stats: SolveStats::default(),
        ws,
        events,
        restart_cap: 64,
        sweep: true,
        witness: Vec::new(),
    };
    let r = engine.run_level(0, n, None);
    finish(engine, r)
}

/// Low-space mode: per-level k-wise-independent sequences computed on demand,
/// verification sweep and restart per level.
pub fn solve_prg<I: ViolatorInstance>(
    inst: &I,
    seed: u64,
    opts: &PrgOptions,
    ws: &mut Workspace,
) -> Result<(Basis, I::Cell, SolveStats)> {
    let d = inst.dim();
    let degree = opts.degree.unwrap_or_else(|| prg::default_degree(d));
    let copies = opts.copies.unwrap_or_else(|| prg::default_copies(d));
    let n = inst.constraint_count() as u64;
    let mut engine = Engine {
        inst,
        levels: Levels {
            mode: Mode::Prg { degree, copies },
            entropy: Entropy::new(seed).fork(0x7c),
            stack: Vec::new(),
        },
        stats: SolveStats::default(),
        ws,
        events: None,
        restart_cap: opts.restart_cap,
        sweep: true,
        witness: Vec::new(),
    };
    let r = engine.run_level(0, n, None);
    finish(engine, r)
}

// ---------------------------------------------------------------------------
// Axiom checking
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub n: usize,
    pub failures: Vec<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exhaustively verify consistency, locality and monotonicity of the violator
/// function induced by `basis_of` + `violates` on all subsets. Exponential;
/// callers keep n <= 12.
pub fn check_violator_axioms<I: ViolatorInstance>(inst: &I) -> Result<AxiomReport> {
    let n = inst.constraint_count();
    assert!(n <= 12, "axiom sweep is exponential; n must be <= 12");
    let mut ws = Workspace::new();
    let full = 1u32 << n;
    let names = |mask: u32| -> Vec<usize> { (0..n).filter(|i| mask >> i & 1 == 1).collect() };

    // violator set of every subset, as a bitmask
    let mut viol = vec![0u32; full as usize];
    let mut failures = Vec::new();
    for mask in 0..full {
        let ids = names(mask);
        let (basis, cell) = inst.basis_of(&ids, &mut ws)?;
        if basis.len() > inst.dim() {
            failures.push(format!("basis of {ids:?} has size {}", basis.len()));
        }
        if !basis.iter().all(|b| ids.contains(b)) {
            failures.push(format!("basis of {ids:?} not a subset: {basis:?}"));
        }
        let mut v = 0u32;
        for c in 0..n {
            if inst.violates(c, &cell) {
                v |= 1 << c;
            }
        }
        viol[mask as usize] = v;
    }

    for mask in 0..full {
        // consistency
        if viol[mask as usize] & mask != 0 {
            failures.push(format!(
                "consistency: v({:?}) intersects the set itself",
                names(mask)
            ));
        }
        // locality against supersets
        let rest = (full - 1) & !mask;
        let mut add = rest;
        loop {
            let sup = mask | add;
            if viol[mask as usize] & sup == 0 && viol[mask as usize] != viol[sup as usize] {
                failures.push(format!(
                    "locality: v({:?}) = {:?} but v({:?}) = {:?}",
                    names(mask),
                    names(viol[mask as usize]),
                    names(sup),
                    names(viol[sup as usize]),
                ));
            }
            if add == 0 {
                break;
            }
            add = (add - 1) & rest;
        }
        if failures.len() > 16 {
            break; // enough witnesses
        }
    }

    // monotonicity A <= B <= C
    'outer: for c_mask in 0..full {
        let mut b_sub = c_mask;
        loop {
            let mut a_sub = b_sub;
            loop {
                if viol[a_sub as usize] == viol[c_mask as usize]
                    && viol[a_sub as usize] != viol[b_sub as usize]
                {
                    failures.push(format!(
                        "monotonicity: v({:?}) = v({:?}) but v({:?}) differs",
                        names(a_sub),
                        names(c_mask),
                        names(b_sub),
                    ));
                    if failures.len() > 16 {
                        break 'outer;
                    }
                }
                if a_sub == 0 {
                    break;
                }
                a_sub = (a_sub - 1) & b_sub;
            }
            if b_sub == 0 {
                break;
            }
            b_sub = (b_sub - 1) & c_mask;
        }
    }

    Ok(AxiomReport { n, failures })
}

// ---------------------------------------------------------------------------
// Bundled reference instance: 1-D LP "max a_i", dimension 1.
// ---------------------------------------------------------------------------

pub struct MaxLp {
    pub values: Vec<f64>,
}

impl ViolatorInstance for MaxLp {
    type Cell = Option<(usize, f64)>;

    fn constraint_count(&self) -> usize {
        self.values.len()
    }
    fn dim(&self) -> usize {
        1
    }
    fn basis_of(&self, ids: &[usize], _ws: &mut Workspace) -> Result<(Vec<usize>, Self::Cell)> {
        let mut best: Option<(usize, f64)> = None;
        for &i in ids {
            let v = self.values[i];
            best = match best {
                None => Some((i, v)),
                Some((bi, bv)) => {
                    if v > bv || (v == bv && i < bi) {
                        Some((i, v))
                    } else {
                        Some((bi, bv))
                    }
                }
            };
        }
        Ok((best.iter().map(|&(i, _)| i).collect(), best))
    }
    fn violates(&self, c: usize, cell: &Self::Cell) -> bool {
        match cell {
            None => true,
            Some((bi, bv)) => self.values[c] > *bv || (self.values[c] == *bv && c < *bi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(values: &[f64]) -> MaxLp {
        MaxLp {
            values: values.to_vec(),
        }
    }

    #[test]
    fn solve_vs_empty_sequence() {
        let inst = lp(&[3.0, 7.0]);
        let mut ws = Workspace::new();
        let (b, cell, _) = solve_vs(&inst, &[], &[], 1, &mut ws).unwrap();
        assert!(b.constraints.is_empty());
        assert!(cell.is_none());
    }

    #[test]
    fn solve_vs_max_of_list() {
        let inst = lp(&[3.0, 7.0, 2.0, 9.0, 5.0]);
        let mut ws = Workspace::new();
        let (b, _, _) = solve_vs(&inst, &[], &[0, 1, 2, 3, 4], 1, &mut ws).unwrap();
        assert_eq!(b.constraints, vec![3]);
    }

    #[test]
    fn permutation_mode_correct_and_seed_stable() {
        let inst = lp(&[1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.0, 6.0]);
        let mut bases = Vec::new();
        for seed in 0..10 {
            let mut ws = Workspace::new();
            let (b, cell, stats) = solve_permutation(&inst, seed, &mut ws).unwrap();
            for c in 0..inst.constraint_count() {
                assert!(!inst.violates(c, &cell));
            }
            assert!(stats.max_recursion_depth as usize <= inst.dim());
            bases.push(b);
        }
        assert!(bases.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn prg_mode_matches_permutation() {
        let vals: Vec<f64> = (0..200).map(|i| ((i * 7919) % 997) as f64).collect();
        let inst = lp(&vals);
        let mut ws = Workspace::new();
        let (bp, _, _) = solve_permutation(&inst, 5, &mut ws).unwrap();
        let mut ws2 = Workspace::new();
        let (bq, cell, stats) = solve_prg(&inst, 6, &PrgOptions::default(), &mut ws2).unwrap();
        assert_eq!(bp, bq);
        for c in 0..inst.constraint_count() {
            assert!(!inst.violates(c, &cell));
        }
        assert!(stats.violation_tests > 0);
    }

    #[test]
    fn violation_tests_linear_in_n() {
        // mean tests per constraint stays bounded as n grows
        let mut per_n = Vec::new();
        for &n in &[100usize, 200, 400] {
            let vals: Vec<f64> = (0..n).map(|i| ((i * 2654435761) % 1000003) as f64).collect();
            let inst = lp(&vals);
            let mut total = 0f64;
            for seed in 0..50 {
                let mut ws = Workspace::new();
                let (_, _, stats) = solve_permutation(&inst, seed, &mut ws).unwrap();
                total += stats.violation_tests as f64;
            }
            per_n.push(total / 50.0 / n as f64);
        }
        let lo = per_n.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = per_n.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 1.5, "tests/n not flat: {per_n:?}");
    }

    #[test]
    fn axioms_hold_for_max_lp() {
        let inst = lp(&[2.0, 9.0, 4.0, 7.0, 1.0]);
        let report = check_violator_axioms(&inst).unwrap();
        assert!(report.ok(), "{:?}", report.failures);
    }

    /// Wrapper that corrupts violation tests for one constraint.
    struct Corrupted(MaxLp);
    impl ViolatorInstance for Corrupted {
        type Cell = Option<(usize, f64)>;
        fn constraint_count(&self) -> usize {
            self.0.constraint_count()
        }
        fn dim(&self) -> usize {
            self.0.dim()
        }
        fn basis_of(&self, ids: &[usize], ws: &mut Workspace) -> Result<(Vec<usize>, Self::Cell)> {
            self.0.basis_of(ids, ws)
        }
        fn violates(&self, c: usize, cell: &Self::Cell) -> bool {
            if c == 2 {
                // lies: claims violation iff the basis is constraint 1
                matches!(cell, Some((1, _)))
            } else {
                self.0.violates(c, cell)
            }
        }
    }

    #[test]
    fn corrupted_instance_fails_axioms_with_witness() {
        let inst = Corrupted(lp(&[2.0, 9.0, 4.0, 7.0, 1.0]));
        let report = check_violator_axioms(&inst).unwrap();
        assert!(!report.ok());
        assert!(report.failures.iter().any(|f| f.contains("consistency") || f.contains("locality")));
    }

    #[test]
    fn witness_persistence_on_replay() {
        // every basis computed beneath a recursive call contains the
        // constraint that triggered the call
        let vals: Vec<f64> = (0..24).map(|i| ((i * 31) % 17) as f64 + (i as f64) * 0.01).collect();
        let inst = lp(&vals);
        for seed in 0..20 {
            let mut ws = Workspace::new();
            let mut events = Vec::new();
            let _ = solve_permutation_observed(&inst, seed, &mut ws, Some(&mut events)).unwrap();
            let mut active: Vec<(usize, usize)> = Vec::new(); // (level, trigger)
            for ev in &events {
                match ev {
                    SolveEvent::Recurse { level, trigger } => active.push((*level, *trigger)),
                    SolveEvent::LevelDone { level } => {
                        active.retain(|(l, _)| l != level);
                    }
                    SolveEvent::BasisComputed { level, basis } => {
                        for (l, t) in &active {
                            if level >= l {
                                assert!(
                                    basis.contains(t),
                                    "basis {basis:?} at level {level} misses trigger {t}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn workspace_balances_after_solve() {
        let inst = lp(&[5.0, 1.0, 9.0, 3.0]);
        let mut ws = Workspace::new();
        let _ = solve_prg(&inst, 3, &PrgOptions::default(), &mut ws).unwrap();
        assert_eq!(ws.current(), 0, "unbalanced workspace charges");
    }
}
