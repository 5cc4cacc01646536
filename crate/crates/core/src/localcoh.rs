//! Annihilators of `H^j_{S_+}(S)` through `Ext^{d-j}_A(S, A)` over a
//! polynomial subalgebra `A = F_q[theta_1..theta_d]` generated by an hsop.
//!
//! Modules are handled degree by degree up to a window `W`. Free modules
//! `F = sum_k A(-t_k)` are stored in the coordinates of the monomial bases of
//! `A_{n - t_k}`, block after block.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactalg::{kernel_of_columns, Echelon, FieldSpec, Insert, Scalar, SparseMatrix, SparseVec, Subquotient};
use crate::group::MatrixGroup;
use crate::invariants::{check_invariant, validate_hsop, InvariantRing};
use crate::polyring::{Homogeneity, Polynomial};

/// Graded basis of `A` in one weighted degree.
#[derive(Debug)]
struct WeightedBasis {
    monos: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

/// `F_q[theta_1..theta_d]` with `deg theta_j = e_j >= 1`.
#[derive(Debug)]
pub struct WeightedAlgebra {
    field: FieldSpec,
    degrees: Vec<usize>,
    bases: Mutex<HashMap<usize, Arc<WeightedBasis>>>,
}

impl WeightedAlgebra {
    pub fn new(field: FieldSpec, degrees: Vec<usize>) -> Result<WeightedAlgebra> {
        if degrees.contains(&0) {
            return Err(Error::HsopInvalid("hsop elements must have positive degree".into()));
        }
        Ok(WeightedAlgebra { field, degrees, bases: Mutex::new(HashMap::new()) })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    fn basis(&self, n: usize) -> Arc<WeightedBasis> {
        if let Some(b) = self.bases.lock().unwrap().get(&n) {
            return b.clone();
        }
        let mut monos = Vec::new();
        let mut cur = vec![0u16; self.degrees.len()];
        self.enumerate(0, n, &mut cur, &mut monos);
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let b = Arc::new(WeightedBasis { monos, index });
        self.bases.lock().unwrap().insert(n, b.clone());
        b
    }

    fn enumerate(&self, j: usize, left: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if j == self.degrees.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in (0..=left / self.degrees[j]).rev() {
            cur[j] = e as u16;
            self.enumerate(j + 1, left - e * self.degrees[j], cur, out);
        }
        cur[j] = 0;
    }

    pub fn dim(&self, n: usize) -> usize {
        self.basis(n).monos.len()
    }

    /// Exponent vector of basis element `idx` of `A_n`.
    pub fn monomial(&self, n: usize, idx: usize) -> Vec<u16> {
        self.basis(n).monos[idx].clone()
    }

    /// Index in `A_{a+b}` of the product of two basis monomials.
    fn mul_index(&self, a: usize, i: usize, b: usize, j: usize) -> usize {
        let (ba, bb) = (self.basis(a), self.basis(b));
        let prod: Vec<u16> = ba.monos[i].iter().zip(&bb.monos[j]).map(|(x, y)| x + y).collect();
        self.basis(a + b).index[&prod]
    }

    /// Index in `A_{n + e_j}` of `theta_j` times basis element `idx` of `A_n`.
    fn times_var(&self, j: usize, n: usize, idx: usize) -> usize {
        let mut m = self.basis(n).monos[idx].clone();
        m[j] += 1;
        self.basis(n + self.degrees[j]).index[&m]
    }

    /// `theta^alpha` evaluated on concrete hsop elements.
    pub fn evaluate(&self, theta: &[Polynomial], n: usize, idx: usize) -> Polynomial {
        let mono = self.monomial(n, idx);
        let mut acc = Polynomial::constant(&self.field, theta[0].nvars(), Scalar::ONE);
        for (t, &e) in theta.iter().zip(&mono) {
            if e > 0 {
                acc = &acc * &t.pow(e as u64);
            }
        }
        acc
    }
}

/// A graded `A`-module known degree by degree.
pub trait GradedTarget: Send + Sync {
    fn dim(&self, n: usize) -> Result<usize>;
    /// `theta_j * v` for `v` in degree `n`.
    fn act(&self, j: usize, n: usize, v: &SparseVec) -> Result<SparseVec>;
    /// Multiplication by an element of a larger ring acting compatibly, if any.
    fn multiply(&self, s: &Polynomial, n: usize, v: &SparseVec) -> Result<SparseVec> {
        let _ = (s, n, v);
        Err(Error::Input("this module has no multiplication by outside elements".into()))
    }
}

/// `S` as an `A`-module, in invariant coordinates.
pub struct InvariantModule {
    s: Arc<InvariantRing>,
    theta: Vec<Polynomial>,
    cache: Mutex<HashMap<(usize, usize), Arc<SparseMatrix>>>,
}

impl InvariantModule {
    pub fn new(s: Arc<InvariantRing>, theta: Vec<Polynomial>) -> InvariantModule {
        InvariantModule { s, theta, cache: Mutex::new(HashMap::new()) }
    }
    pub fn invariants(&self) -> &Arc<InvariantRing> {
        &self.s
    }
}

impl GradedTarget for InvariantModule {
    fn dim(&self, n: usize) -> Result<usize> {
        self.s.dim(n)
    }
    fn act(&self, j: usize, n: usize, v: &SparseVec) -> Result<SparseVec> {
        let key = (j, n);
        let m = self.cache.lock().unwrap().get(&key).cloned();
        let m = match m {
            Some(m) => m,
            None => {
                let m = Arc::new(self.s.mult_matrix(&self.theta[j], n)?);
                self.cache.lock().unwrap().insert(key, m.clone());
                m
            }
        };
        Ok(m.apply(self.s.field(), v))
    }
    fn multiply(&self, s: &Polynomial, n: usize, v: &SparseVec) -> Result<SparseVec> {
        Ok(self.s.mult_matrix(s, n)?.apply(self.s.field(), v))
    }
}

/// Block layout of `F = sum_k A(-t_k)`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    algebra: Arc<WeightedAlgebra>,
    pub twists: Vec<usize>,
}

impl FreeModule {
    pub fn new(algebra: Arc<WeightedAlgebra>, twists: Vec<usize>) -> FreeModule {
        FreeModule { algebra, twists }
    }

    /// `(offset, dim)` of each block in degree `n`; `None` when `n < t_k`.
    pub fn layout(&self, n: usize) -> Vec<Option<(usize, usize)>> {
        let mut offset = 0;
        self.twists
            .iter()
            .map(|&t| {
                if n < t {
                    return None;
                }
                let d = self.algebra.dim(n - t);
                offset += d;
                Some((offset - d, d))
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    fn locate(layout: &[Option<(usize, usize)>], idx: usize) -> (usize, usize) {
        for (k, b) in layout.iter().enumerate() {
            if let Some((o, d)) = *b {
                if idx >= o && idx < o + d {
                    return (k, idx - o);
                }
            }
        }
        panic!("index {idx} outside the free module");
    }

    /// `theta^beta * v` for `v` in degree `n`, `beta` a basis monomial of `A_b`.
    pub fn shift(&self, v: &SparseVec, n: usize, b: usize, beta: usize) -> SparseVec {
        let src = self.layout(n);
        let dst = self.layout(n + b);
        let pairs = v
            .entries()
            .iter()
            .map(|&(idx, c)| {
                let (k, local) = Self::locate(&src, idx);
                let target = self.algebra.mul_index(n - self.twists[k], local, b, beta);
                (dst[k].unwrap().0 + target, c)
            })
            .collect();
        SparseVec::from_pairs(&self.algebra.field, pairs)
    }

    /// Block `k` of `v` (degree `n`) as coordinates in `A_{n - t_k}`.
    fn block(&self, v: &SparseVec, n: usize, k: usize) -> Option<SparseVec> {
        let (o, d) = self.layout(n)[k]?;
        Some(v.window(o, o + d))
    }
}

impl GradedTarget for FreeModule {
    fn dim(&self, n: usize) -> Result<usize> {
        Ok(self.layout(n).iter().flatten().map(|b| b.1).sum())
    }
    fn act(&self, j: usize, n: usize, v: &SparseVec) -> Result<SparseVec> {
        let src = self.layout(n);
        let dst = self.layout(n + self.algebra.degrees[j]);
        let pairs = v
            .entries()
            .iter()
            .map(|&(idx, c)| {
                let (k, local) = Self::locate(&src, idx);
                (dst[k].unwrap().0 + self.algebra.times_var(j, n - self.twists[k], local), c)
            })
            .collect();
        Ok(SparseVec::from_pairs(&self.algebra.field, pairs))
    }
}

/// One step `F_L -> X` of a resolution, where `X` is the module itself
/// (`L = 0`) or the previous free module.
#[derive(Clone, Debug)]
pub struct ResolutionLevel {
    pub free: FreeModule,
    /// Generator `k` as a vector of `X` in degree `t_k`.
    pub generators: Vec<SparseVec>,
    /// The map in each degree `n <= W`.
    pub maps: Vec<SparseMatrix>,
    /// Kernel basis in each degree `n <= W`.
    pub kernels: Vec<Vec<SparseVec>>,
}

impl ResolutionLevel {
    pub fn twists(&self) -> &[usize] {
        &self.free.twists
    }
    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Minimal generators of the submodule `N` of `X` with degree pieces
/// `pieces[n]`, and the free cover mapping onto it, through degree `W`.
fn cover(
    algebra: &Arc<WeightedAlgebra>,
    x: &dyn GradedTarget,
    pieces: &[Vec<SparseVec>],
    window: usize,
) -> Result<ResolutionLevel> {
    let field = algebra.field.clone();
    let e = algebra.degrees.clone();
    let mut twists = Vec::new();
    let mut generators = Vec::new();
    // columns[n][k] = images of the basis monomials of A_{n - t_k} times generator k
    let mut columns: Vec<Vec<Vec<SparseVec>>> = Vec::with_capacity(window + 1);
    for n in 0..=window {
        let mut per_gen: Vec<Vec<SparseVec>> = Vec::with_capacity(twists.len());
        for (k, &t) in twists.iter().enumerate() {
            let a = n - t;
            let basis = algebra.basis(a);
            let mut cols = Vec::with_capacity(basis.monos.len());
            for mono in &basis.monos {
                let j = mono.iter().position(|&x| x > 0).expect("degree zero handled at creation");
                let mut prev = mono.clone();
                prev[j] -= 1;
                let idx = algebra.basis(a - e[j]).index[&prev];
                cols.push(x.act(j, n - e[j], &columns[n - e[j]][k][idx])?);
            }
            per_gen.push(cols);
        }
        // new generators: pieces of N in degree n not reached by the existing ones
        let dim = x.dim(n)?;
        let mut ech = Echelon::new(&field, dim);
        for cols in &per_gen {
            for c in cols {
                ech.insert(c.clone());
            }
        }
        for v in &pieces[n] {
            if let Insert::Independent(_) = ech.insert_tagged(v.clone(), SparseVec::new()) {
                twists.push(n);
                generators.push(v.clone());
                per_gen.push(vec![v.clone()]);
            }
        }
        if ech.rank() != pieces[n].len() {
            return Err(Error::Audit(format!("cover does not match the submodule in degree {n}")));
        }
        columns.push(per_gen);
    }
    let free = FreeModule::new(algebra.clone(), twists);
    let mut maps = Vec::with_capacity(window + 1);
    let mut kernels = Vec::with_capacity(window + 1);
    for (n, per_gen) in columns.into_iter().enumerate() {
        let cols: Vec<SparseVec> = per_gen.into_iter().flatten().collect();
        let rows = x.dim(n)?;
        let (rank, kernel) = kernel_of_columns(&field, rows, cols.clone());
        if rank != pieces[n].len() {
            return Err(Error::Audit(format!("image rank {rank} differs from {} in degree {n}", pieces[n].len())));
        }
        maps.push(SparseMatrix::new(rows, cols));
        kernels.push(kernel);
    }
    Ok(ResolutionLevel { free, generators, maps, kernels })
}

/// `S` presented over `A`: generators and the first syzygies, through degree `W`.
#[derive(Clone)]
pub struct ModulePresentation {
    pub algebra: Arc<WeightedAlgebra>,
    pub target: Arc<dyn GradedTarget>,
    /// Set when the module is `S` itself.
    pub invariants: Option<Arc<InvariantRing>>,
    pub window: usize,
    pub generators: ResolutionLevel,
    pub relations: ResolutionLevel,
}

impl std::fmt::Debug for ModulePresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModulePresentation")
            .field("degrees", &self.algebra.degrees)
            .field("window", &self.window)
            .field("generator_degrees", &self.generators.twists())
            .field("relation_degrees", &self.relations.twists())
            .finish()
    }
}

impl ModulePresentation {
    pub fn generator_degrees(&self) -> &[usize] {
        self.generators.twists()
    }
    pub fn relation_degrees(&self) -> &[usize] {
        self.relations.twists()
    }
    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }
}

/// Presentation of an arbitrary graded `A`-module through degree `W`.
pub fn present_module(algebra: Arc<WeightedAlgebra>, target: Arc<dyn GradedTarget>, window: usize) -> Result<ModulePresentation> {
    let pieces = (0..=window)
        .map(|n| Ok((0..target.dim(n)?).map(SparseVec::unit).collect()))
        .collect::<Result<Vec<Vec<SparseVec>>>>()?;
    let generators = cover(&algebra, target.as_ref(), &pieces, window)?;
    let relations = cover(&algebra, &generators.free, &generators.kernels, window)?;
    Ok(ModulePresentation { algebra, target, invariants: None, window, generators, relations })
}

pub fn present_over_hsop(s: Arc<InvariantRing>, theta: &[Polynomial], window: usize) -> Result<ModulePresentation> {
    if !validate_hsop(s.group(), theta)? {
        return Err(Error::HsopInvalid("sequence is not zero-dimensional".into()));
    }
    let degrees = theta
        .iter()
        .map(|t| match t.homogeneity() {
            Homogeneity::Homogeneous(k) => Ok(k),
            _ => Err(Error::HsopInvalid("hsop elements must be nonzero and homogeneous".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    let algebra = Arc::new(WeightedAlgebra::new(s.field().clone(), degrees)?);
    let target = Arc::new(InvariantModule::new(s.clone(), theta.to_vec()));
    let mut pres = present_module(algebra.clone(), target, window)?;
    pres.invariants = Some(s);
    // dimension audit against the invariant slices
    for n in 0..=window {
        let presented = pres.generators.maps[n].cols() - pres.generators.kernels[n].len();
        if presented != pres.target.dim(n)? {
            return Err(Error::Audit(format!("presented dimension {presented} differs from dim S_{n}")));
        }
    }
    Ok(pres)
}

/// A minimal graded free resolution, exact through degree `window`.
#[derive(Clone)]
pub struct GradedResolution {
    pub algebra: Arc<WeightedAlgebra>,
    pub target: Arc<dyn GradedTarget>,
    pub invariants: Option<Arc<InvariantRing>>,
    pub window: usize,
    /// `levels[L]` maps `F_L` onto the kernel of the previous map.
    pub levels: Vec<ResolutionLevel>,
}

impl std::fmt::Debug for GradedResolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedResolution")
            .field("window", &self.window)
            .field("twists", &self.levels.iter().map(|l| l.twists().to_vec()).collect::<Vec<_>>())
            .finish()
    }
}

impl GradedResolution {
    /// Index of the last nonzero free module.
    pub fn length(&self) -> usize {
        self.levels.len() - 1
    }
    pub fn twists(&self, level: usize) -> &[usize] {
        self.levels.get(level).map_or(&[], |l| l.twists())
    }
    /// `sum_L (-1)^L rank F_L`, the rank of the module over `A`.
    pub fn alternating_rank(&self) -> i64 {
        self.levels.iter().enumerate().map(|(l, lv)| if l % 2 == 0 { 1 } else { -1 } * lv.free.rank() as i64).sum()
    }
}

/// Continue a presentation to a resolution of length at most `max_length`.
pub fn free_resolution(pres: &ModulePresentation, max_length: usize) -> Result<GradedResolution> {
    let mut levels = vec![pres.generators.clone()];
    let mut next = pres.relations.clone();
    while !next.is_empty() {
        if levels.len() > max_length {
            return Err(Error::WindowTooSmall(format!(
                "syzygies beyond length {max_length} through degree {}; a larger window is needed",
                pres.window
            )));
        }
        let following = cover(&pres.algebra, &next.free, &next.kernels, pres.window)?;
        levels.push(next);
        next = following;
    }
    let res = GradedResolution {
        algebra: pres.algebra.clone(),
        target: pres.target.clone(),
        invariants: pres.invariants.clone(),
        window: pres.window, levels };
    for n in 0..=res.window {
        let mut chi = 0i64;
        for (l, lv) in res.levels.iter().enumerate() {
            chi += if l % 2 == 0 { 1 } else { -1 } * lv.maps[n].cols() as i64;
        }
        if chi != res.target.dim(n)? as i64 {
            return Err(Error::Audit(format!("resolution is not exact in degree {n}")));
        }
        for w in res.levels.windows(2) {
            if !w[0].maps[n].mul(&pres.algebra.field, &w[1].maps[n])?.is_zero() {
                return Err(Error::Audit(format!("composite of resolution maps is nonzero in degree {n}")));
            }
        }
    }
    Ok(res)
}

/// Degree `m` piece of `Hom_A(F, A) = sum_k A(t_k)`.
fn hom_layout(alg: &WeightedAlgebra, twists: &[usize], m: i64) -> Vec<Option<(usize, usize)>> {
    let mut offset = 0;
    twists
        .iter()
        .map(|&t| {
            let deg = m + t as i64;
            if deg < 0 {
                return None;
            }
            let d = alg.dim(deg as usize);
            offset += d;
            Some((offset - d, d))
        })
        .collect()
}

fn hom_dim(layout: &[Option<(usize, usize)>]) -> usize {
    layout.iter().flatten().map(|b| b.1).sum()
}

/// The dual of an `A`-linear map `F' -> F` given by the images of the
/// generators of `F'`: vector `k` lies in `F` in degree `t'_k + shift`. The
/// result maps `Hom(F, A)_m -> Hom(F', A)_{m + shift}`.
fn dual_matrix(
    alg: &WeightedAlgebra,
    free: &FreeModule,
    images: &[(usize, &SparseVec)],
    shift: usize,
    m: i64,
) -> SparseMatrix {
    let src = hom_layout(alg, &free.twists, m);
    let dst_twists: Vec<usize> = images.iter().map(|&(t, _)| t).collect();
    let dst = hom_layout(alg, &dst_twists, m + shift as i64);
    // entries[l] = (k, degree in A, coordinates) of block l of each image
    let mut entries: Vec<Vec<(usize, usize, SparseVec)>> = vec![Vec::new(); free.twists.len()];
    for (k, &(t, v)) in images.iter().enumerate() {
        let n = t + shift;
        for (l, &tl) in free.twists.iter().enumerate() {
            if let Some(b) = free.block(v, n, l) {
                if !b.is_zero() {
                    entries[l].push((k, n - tl, b));
                }
            }
        }
    }
    let field = &alg.field;
    let mut columns = Vec::with_capacity(hom_dim(&src));
    for (l, blk) in src.iter().enumerate() {
        let Some((_, d)) = *blk else { continue };
        let a = (m + free.twists[l] as i64) as usize;
        for beta in 0..d {
            let mut pairs = Vec::new();
            for (k, deg, coords) in &entries[l] {
                let (o, _) = dst[*k].expect("target block present");
                for &(g, c) in coords.entries() {
                    pairs.push((o + alg.mul_index(a, beta, *deg, g), c));
                }
            }
            columns.push(SparseVec::from_pairs(field, pairs));
        }
    }
    SparseMatrix::new(hom_dim(&dst), columns)
}

fn level_images(level: &ResolutionLevel) -> Vec<(usize, &SparseVec)> {
    level.twists().iter().copied().zip(level.generators.iter()).collect()
}

/// `Ext^i_A(M, A)_m` for one degree.
#[derive(Clone, Debug)]
pub struct ExtSlice {
    pub m: i64,
    pub cochain_dim: usize,
    pub quotient: Subquotient,
}

impl ExtSlice {
    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

pub fn ext_slice(res: &GradedResolution, i: usize, m: i64) -> Result<ExtSlice> {
    let alg = &res.algebra;
    let field = &alg.field;
    let Some(level) = res.levels.get(i) else {
        let quotient = Subquotient::new(field, 0, Vec::new(), Vec::new());
        return Ok(ExtSlice { m, cochain_dim: 0, quotient });
    };
    let dim = hom_dim(&hom_layout(alg, level.twists(), m));
    let cocycles = match res.levels.get(i + 1) {
        Some(next) => {
            let d = dual_matrix(alg, &level.free, &level_images(next), 0, m);
            kernel_of_columns(field, d.rows(), d.columns().to_vec()).1
        }
        None => (0..dim).map(SparseVec::unit).collect(),
    };
    let coboundaries = if i == 0 {
        Vec::new()
    } else {
        let prev = &res.levels[i - 1];
        let d = dual_matrix(alg, &prev.free, &level_images(level), 0, m);
        if d.rows() != dim {
            return Err(Error::Audit("dual complex shapes disagree".into()));
        }
        d.columns().to_vec()
    };
    let quotient = Subquotient::new(field, dim, coboundaries, cocycles);
    Ok(ExtSlice { m, cochain_dim: dim, quotient })
}

/// Graded pieces of `Ext^i_A(M, A)` over a range of degrees.
#[derive(Clone, Debug)]
pub struct ExtModule {
    pub index: usize,
    pub slices: BTreeMap<i64, ExtSlice>,
}

impl ExtModule {
    pub fn is_zero(&self) -> bool {
        self.slices.values().all(|s| s.dim() == 0)
    }
    pub fn dims(&self) -> Vec<(i64, usize)> {
        self.slices.iter().map(|(&m, s)| (m, s.dim())).collect()
    }
}

pub fn ext_slices(res: &GradedResolution, i: usize, window: RangeInclusive<i64>) -> Result<ExtModule> {
    if window.is_empty() {
        return Err(Error::WindowTooSmall("empty dual window".into()));
    }
    let slices = window.map(|m| Ok((m, ext_slice(res, i, m)?))).collect::<Result<_>>()?;
    Ok(ExtModule { index: i, slices })
}

/// Degrees where `Ext^i` can be nonzero start at `-max twist of F_i`.
pub fn ext_lower_degree(res: &GradedResolution, i: usize) -> i64 {
    -(res.twists(i).iter().copied().max().unwrap_or(0) as i64)
}

/// A chain map lifting multiplication by `s` on the module.
#[derive(Clone, Debug)]
pub struct ChainLift {
    pub s: Polynomial,
    pub degree: usize,
    /// `maps[L][k]`: image of generator `k` of `F_L`, in `F_L` of degree `t_k + deg s`.
    pub maps: Vec<Vec<SparseVec>>,
}

fn solve(field: &FieldSpec, map: &SparseMatrix, target: &SparseVec) -> Option<SparseVec> {
    let mut ech = Echelon::new(field, map.rows());
    for (j, c) in map.columns().iter().enumerate() {
        ech.insert_tagged(c.clone(), SparseVec::unit(j));
    }
    let (res, comb) = ech.reduce(target);
    res.is_zero().then_some(comb)
}

/// `phi(v)` for `v` in `F_L` of degree `n`, where `phi` sends generator `k` to `images[k]`.
fn apply_lift(free: &FreeModule, images: &[SparseVec], degree: usize, v: &SparseVec, n: usize) -> SparseVec {
    let field = &free.algebra.field;
    let layout = free.layout(n);
    let mut out = SparseVec::new();
    for &(idx, c) in v.entries() {
        let (k, local) = FreeModule::locate(&layout, idx);
        let img = free.shift(&images[k], free.twists[k] + degree, n - free.twists[k], local);
        out.axpy(field, c, &img);
    }
    out
}

/// Lift multiplication by a homogeneous `s` through levels `0..=top`.
/// With `seed`, each preimage is moved by a pseudo-random element of the
/// kernel, which gives a second, generally different, lift.
pub fn lift_action(res: &GradedResolution, s: &Polynomial, top: usize, seed: Option<u64>) -> Result<ChainLift> {
    let degree = match s.homogeneity() {
        Homogeneity::Homogeneous(k) => k,
        Homogeneity::Zero => 0,
        Homogeneity::Inhomogeneous => return Err(Error::Inhomogeneous),
    };
    let field = res.algebra.field.clone();
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut maps: Vec<Vec<SparseVec>> = Vec::new();
    for l in 0..=top.min(res.length()) {
        let level = &res.levels[l];
        let mut images = Vec::with_capacity(level.generators.len());
        for (k, gen) in level.generators.iter().enumerate() {
            let t = level.twists()[k];
            let n = t + degree;
            if n > res.window {
                return Err(Error::WindowTooSmall(format!(
                    "lifting needs degree {n} at level {l}, window is {}",
                    res.window
                )));
            }
            let target = if l == 0 {
                res.target.multiply(s, t, gen)?
            } else {
                let prev = &res.levels[l - 1];
                apply_lift(&prev.free, &maps[l - 1], degree, gen, t)
            };
            let mut pre = solve(&field, &level.maps[n], &target)
                .ok_or_else(|| Error::Audit(format!("no preimage while lifting at level {l}, degree {n}")))?;
            if let Some(rng) = rng.as_mut() {
                for kv in &level.kernels[n] {
                    let c = field.from_int(rng.gen_range(0..field.q() as i64));
                    pre.axpy(&field, c, kv);
                }
            }
            images.push(pre);
        }
        maps.push(images);
    }
    Ok(ChainLift { s: s.clone(), degree, maps })
}

/// Matrix of the induced map `Ext^i_m -> Ext^i_{m + deg s}` in representative coordinates.
pub fn induced_on_ext(res: &GradedResolution, lift: &ChainLift, i: usize, from: &ExtSlice, to: &ExtSlice) -> Result<SparseMatrix> {
    if from.dim() == 0 || to.dim() == 0 {
        return Ok(SparseMatrix::zeros(to.dim(), from.dim()));
    }
    let level = &res.levels[i];
    let images: Vec<(usize, &SparseVec)> = level.twists().iter().copied().zip(lift.maps[i].iter()).collect();
    let dual = dual_matrix(&res.algebra, &level.free, &images, lift.degree, from.m);
    let field = &res.algebra.field;
    let cols = from
        .quotient
        .reps()
        .iter()
        .map(|r| {
            let v = dual.apply(field, r);
            to.quotient.project(&v).map(|c| SparseVec::from_dense(&c)).map_err(|_| {
                Error::Audit(format!("induced map leaves the cocycles at m = {}", from.m))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::new(to.dim(), cols))
}

/// Whether `S` is Cohen-Macaulay for a reason that needs no computation.
pub fn cm_short_circuit(group: &MatrixGroup) -> Option<&'static str> {
    if group.d() <= 3 {
        Some("d <= 3: depth S >= min(d, 3)")
    } else if !group.order().is_multiple_of(group.field().p() as usize) {
        Some("p does not divide |G|")
    } else {
        None
    }
}

#[derive(Clone, Debug)]
pub struct ExtSliceWitness {
    pub m: i64,
    pub dim: usize,
    pub exponent: usize,
}

#[derive(Clone, Debug)]
pub struct LocalCertificate {
    /// Local cohomology index `j`; the Ext index is `d - j`.
    pub j: usize,
    pub ext_index: usize,
    pub window: (i64, i64),
    pub s: Polynomial,
    pub s_degree: usize,
    pub a: usize,
    pub slices: Vec<ExtSliceWitness>,
    pub minimality_degree: Option<i64>,
}

#[derive(Clone, Debug)]
pub enum LocalOutcome {
    Certificate(LocalCertificate),
    /// `(m, rank of s^A)` for the slices that survive.
    Exhausted { j: usize, max_power: usize, survivors: Vec<(i64, usize)> },
}

impl LocalOutcome {
    pub fn certificate(&self) -> Option<&LocalCertificate> {
        match self {
            LocalOutcome::Certificate(c) => Some(c),
            LocalOutcome::Exhausted { .. } => None,
        }
    }
}

const SECOND_LIFT_SEED: u64 = 0x5eed_0002;

/// Least `a` with `s^a` zero on `Ext^{d-j}_m` for `m` in the window. The
/// power is found by composing single-step maps from one lift, every step is
/// compared with a second lift, and the result is rechecked by lifting
/// `s^a` (and `s^{a-1}`) directly.
pub fn local_nilpotency(
    res: &GradedResolution,
    s: &Polynomial,
    j: usize,
    window: RangeInclusive<i64>,
    max_power: usize,
) -> Result<LocalOutcome> {
    let d = res.algebra.degrees.len();
    if j >= d {
        return Err(Error::PositionOutOfRange { index: j, len: d });
    }
    if window.is_empty() {
        return Err(Error::WindowTooSmall("empty dual window".into()));
    }
    if let Some(inv) = &res.invariants {
        check_invariant(inv.group(), s)?;
    }
    let i = d - j;
    let lift = lift_action(res, s, i, None)?;
    let second = lift_action(res, s, i, Some(SECOND_LIFT_SEED))?;
    let k = lift.degree as i64;
    let field = res.algebra.field.clone();
    let mut cache: HashMap<i64, Arc<ExtSlice>> = HashMap::new();
    let mut slice_at = |m: i64| -> Result<Arc<ExtSlice>> {
        if let Some(s) = cache.get(&m) {
            return Ok(s.clone());
        }
        let s = Arc::new(ext_slice(res, i, m)?);
        cache.insert(m, s.clone());
        Ok(s)
    };
    let mut steps: HashMap<i64, SparseMatrix> = HashMap::new();
    let mut witnesses = Vec::new();
    let mut survivors = Vec::new();
    let (lo, hi) = (*window.start(), *window.end());
    for m in lo..=hi {
        let src = slice_at(m)?;
        if src.dim() == 0 {
            witnesses.push(ExtSliceWitness { m, dim: 0, exponent: 0 });
            continue;
        }
        let mut comp = SparseMatrix::identity(src.dim());
        let mut found = None;
        for step in 1..=max_power {
            let from_deg = m + (step as i64 - 1) * k;
            if let std::collections::hash_map::Entry::Vacant(e) = steps.entry(from_deg) {
                let from = slice_at(from_deg)?;
                let to = slice_at(from_deg + k)?;
                let one = induced_on_ext(res, &lift, i, &from, &to)?;
                if one != induced_on_ext(res, &second, i, &from, &to)? {
                    return Err(Error::Audit(format!("two lifts induce different maps at m = {from_deg}")));
                }
                e.insert(one);
            }
            comp = steps[&from_deg].mul(&field, &comp)?;
            if comp.is_zero() {
                found = Some(step);
                break;
            }
        }
        match found {
            Some(a) => witnesses.push(ExtSliceWitness { m, dim: src.dim(), exponent: a }),
            None => survivors.push((m, comp.rank(&field))),
        }
    }
    if !survivors.is_empty() {
        return Ok(LocalOutcome::Exhausted { j, max_power, survivors });
    }
    let a = witnesses.iter().map(|w| w.exponent).max().unwrap_or(0).max(1);
    let minimality_degree = witnesses.iter().find(|w| w.exponent == a).map(|w| w.m);
    // recheck with direct lifts of s^a and s^(a-1)
    let direct = lift_action(res, &s.pow(a as u64), i, None)?;
    for w in &witnesses {
        if w.dim == 0 {
            continue;
        }
        let to = slice_at(w.m + a as i64 * k)?;
        if !induced_on_ext(res, &direct, i, &*slice_at(w.m)?, &to)?.is_zero() {
            return Err(Error::Audit(format!("direct lift of s^{a} is nonzero at m = {}", w.m)));
        }
    }
    if let Some(m) = minimality_degree {
        let lower = lift_action(res, &s.pow(a as u64 - 1), i, None)?;
        let to = slice_at(m + (a as i64 - 1) * k)?;
        if induced_on_ext(res, &lower, i, &*slice_at(m)?, &to)?.is_zero() {
            return Err(Error::Audit(format!("exponent {a} is not minimal at m = {m}")));
        }
    }
    Ok(LocalOutcome::Certificate(LocalCertificate {
        j,
        ext_index: i,
        window: (lo, hi),
        s: s.clone(),
        s_degree: lift.degree,
        a,
        slices: witnesses,
        minimality_degree,
    }))
}

/// Scalars in a dual cochain, used by tests that compare against `A`-multiplication.
pub fn scale_hom(res: &GradedResolution, i: usize, j: usize, m: i64, v: &SparseVec) -> SparseVec {
    let alg = &res.algebra;
    let twists = res.twists(i);
    let src = hom_layout(alg, twists, m);
    let dst = hom_layout(alg, twists, m + alg.degrees[j] as i64);
    let pairs: Vec<(usize, Scalar)> = v
        .entries()
        .iter()
        .map(|&(idx, c)| {
            let (k, local) = FreeModule::locate(&src, idx);
            let a = (m + twists[k] as i64) as usize;
            (dst[k].unwrap().0 + alg.times_var(j, a, local), c)
        })
        .collect();
    SparseVec::from_pairs(&alg.field, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{int_matrix, GroupContext};

    fn transvection() -> Arc<InvariantRing> {
        let f2 = FieldSpec::prime(2).unwrap();
        let ctx = GroupContext::new(f2.clone(), 2).unwrap();
        let g = MatrixGroup::close_generators(&ctx, &[int_matrix(&f2, &[&[1, 1], &[0, 1]])]).unwrap();
        Arc::new(InvariantRing::new(Arc::new(g)))
    }

    #[test]
    fn weighted_basis_counts() {
        let alg = WeightedAlgebra::new(FieldSpec::prime(2).unwrap(), vec![1, 2]).unwrap();
        // partitions of n into parts 1 and 2
        let dims: Vec<usize> = (0..8).map(|n| alg.dim(n)).collect();
        assert_eq!(dims, vec![1, 1, 2, 2, 3, 3, 4, 4]);
        assert!(WeightedAlgebra::new(FieldSpec::prime(2).unwrap(), vec![0, 2]).is_err());
    }

    #[test]
    fn polynomial_invariants_are_free_of_rank_one() {
        let s = transvection();
        let theta = vec![s.ring().parse("x1").unwrap(), s.ring().parse("x0^2 + x0*x1").unwrap()];
        let pres = present_over_hsop(s.clone(), &theta, 10).unwrap();
        assert_eq!(pres.generator_degrees(), &[0]);
        assert!(pres.is_free());
        let res = free_resolution(&pres, 2).unwrap();
        assert_eq!(res.length(), 0);
        assert_eq!(res.alternating_rank(), 1);
        for i in 1..=2 {
            assert!(ext_slices(&res, i, -4..=6).unwrap().is_zero());
        }
    }

    #[test]
    fn identity_lift() {
        let s = transvection();
        let theta = vec![s.ring().parse("x1").unwrap(), s.ring().parse("x0^2 + x0*x1").unwrap()];
        let res = free_resolution(&present_over_hsop(s.clone(), &theta, 6).unwrap(), 2).unwrap();
        let lift = lift_action(&res, &s.ring().one(), 0, None).unwrap();
        assert_eq!(lift.maps[0], res.levels[0].generators.iter().map(|_| SparseVec::unit(0)).collect::<Vec<_>>());
        assert!(lift_action(&res, &theta[1].pow(4), 0, None).is_err());
    }
}
