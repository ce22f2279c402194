//! k-wise-independent pseudo-random constraint sequences.
//!
//! A sequence spec is c' blocks of degree-Delta polynomial coefficients over a
//! prime field; the i-th value is computable on demand in O(Delta) time with
//! O(c' * Delta) stored words, replacing an explicitly stored permutation.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All primes below 8192, then a doubling chain up to beyond 2^61. Every
/// adjacent pair differs by a factor of at most two, so for any m in range
/// there is a table prime in [m, 2m]. Verified by `prime_table_sound`.
pub const PRIME_TABLE: &[u64] = &[
2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
197, 199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307,
311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379, 383, 389, 397, 401, 409, 419, 421,
431, 433, 439, 443, 449, 457, 461, 463, 467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547,
557, 563, 569, 571, 577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761, 769, 773, 787, 797,
809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863, 877, 881, 883, 887, 907, 911, 919, 929,
937, 941, 947, 953, 967, 971, 977, 983, 991, 997, 1009, 1013, 1019, 1021, 1031, 1033, 1039,
1049, 1051, 1061, 1063, 1069, 1087, 1091, 1093, 1097, 1103, 1109, 1117, 1123, 1129, 1151, 1153,
1163, 1171, 1181, 1187, 1193, 1201, 1213, 1217, 1223, 1229, 1231, 1237, 1249, 1259, 1277, 1279,
1283, 1289, 1291, 1297, 1301, 1303, 1307, 1319, 1321, 1327, 1361, 1367, 1373, 1381, 1399, 1409,
1423, 1427, 1429, 1433, 1439, 1447, 1451, 1453, 1459, 1471, 1481, 1483, 1487, 1489, 1493, 1499,
1511, 1523, 1531, 1543, 1549, 1553, 1559, 1567, 1571, 1579, 1583, 1597, 1601, 1607, 1609, 1613,
1619, 1621, 1627, 1637, 1657, 1663, 1667, 1669, 1693, 1697, 1699, 1709, 1721, 1723, 1733, 1741,
1747, 1753, 1759, 1777, 1783, 1787, 1789, 1801, 1811, 1823, 1831, 1847, 1861, 1867, 1871, 1873,
1877, 1879, 1889, 1901, 1907, 1913, 1931, 1933, 1949, 1951, 1973, 1979, 1987, 1993, 1997, 1999,
2003, 2011, 2017, 2027, 2029, 2039, 2053, 2063, 2069, 2081, 2083, 2087, 2089, 2099, 2111, 2113,
2129, 2131, 2137, 2141, 2143, 2153, 2161, 2179, 2203, 2207, 2213, 2221, 2237, 2239, 2243, 2251,
2267, 2269, 2273, 2281, 2287, 2293, 2297, 2309, 2311, 2333, 2339, 2341, 2347, 2351, 2357, 2371,
2377, 2381, 2383, 2389, 2393, 2399, 2411, 2417, 2423, 2437, 2441, 2447, 2459, 2467, 2473, 2477,
2503, 2521, 2531, 2539, 2543, 2549, 2551, 2557, 2579, 2591, 2593, 2609, 2617, 2621, 2633, 2647,
2657, 2659, 2663, 2671, 2677, 2683, 2687, 2689, 2693, 2699, 2707, 2711, 2713, 2719, 2729, 2731,
2741, 2749, 2753, 2767, 2777, 2789, 2791, 2797, 2801, 2803, 2819, 2833, 2837, 2843, 2851, 2857,
2861, 2879, 2887, 2897, 2903, 2909, 2917, 2927, 2939, 2953, 2957, 2963, 2969, 2971, 2999, 3001,
3011, 3019, 3023, 3037, 3041, 3049, 3061, 3067, 3079, 3083, 3089, 3109, 3119, 3121, 3137, 3163,
3167, 3169, 3181, 3187, 3191, 3203, 3209, 3217, 3221, 3229, 3251, 3253, 3257, 3259, 3271, 3299,
3301, 3307, 3313, 3319, 3323, 3329, 3331, 3343, 3347, 3359, 3361, 3371, 3373, 3389, 3391, 3407,
3413, 3433, 3449, 3457, 3461, 3463, 3467, 3469, 3491, 3499, 3511, 3517, 3527, 3529, 3533, 3539,
3541, 3547, 3557, 3559, 3571, 3581, 3583, 3593, 3607, 3613, 3617, 3623, 3631, 3637, 3643, 3659,
3671, 3673, 3677, 3691, 3697, 3701, 3709, 3719, 3727, 3733, 3739, 3761, 3767, 3769, 3779, 3793,
3797, 3803, 3821, 3823, 3833, 3847, 3851, 3853, 3863, 3877, 3881, 3889, 3907, 3911, 3917, 3919,
3923, 3929, 3931, 3943, 3947, 3967, 3989, 4001, 4003, 4007, 4013, 4019, 4021, 4027, 4049, 4051,
4057, 4073, 4079, 4091, 4093, 4099, 4111, 4127, 4129, 4133, 4139, 4153, 4157, 4159, 4177, 4201,
4211, 4217, 4219, 4229, 4231, 4241, 4243, 4253, 4259, 4261, 4271, 4273, 4283, 4289, 4297, 4327,
4337, 4339, 4349, 4357, 4363, 4373, 4391, 4397, 4409, 4421, 4423, 4441, 4447, 4451, 4457, 4463,
4481, 4483, 4493, 4507, 4513, 4517, 4519, 4523, 4547, 4549, 4561, 4567, 4583, 4591, 4597, 4603,
4621, 4637, 4639, 4643, 4649, 4651, 4657, 4663, 4673, 4679, 4691, 4703, 4721, 4723, 4729, 4733,
4751, 4759, 4783, 4787, 4789, 4793, 4799, 4801, 4813, 4817, 4831, 4861, 4871, 4877, 4889, 4903,
4909, 4919, 4931, 4933, 4937, 4943, 4951, 4957, 4967, 4969, 4973, 4987, 4993, 4999, 5003, 5009,
5011, 5021, 5023, 5039, 5051, 5059, 5077, 5081, 5087, 5099, 5101, 5107, 5113, 5119, 5147, 5153,
5167, 5171, 5179, 5189, 5197, 5209, 5227, 5231, 5233, 5237, 5261, 5273, 5279, 5281, 5297, 5303,
5309, 5323, 5333, 5347, 5351, 5381, 5387, 5393, 5399, 5407, 5413, 5417, 5419, 5431, 5437, 5441,
5443, 5449, 5471, 5477, 5479, 5483, 5501, 5503, 5507, 5519, 5521, 5527, 5531, 5557, 5563, 5569,
5573, 5581, 5591, 5623, 5639, 5641, 5647, 5651, 5653, 5657, 5659, 5669, 5683, 5689, 5693, 5701,
5711, 5717, 5737, 5741, 5743, 5749, 5779, 5783, 5791, 5801, 5807, 5813, 5821, 5827, 5839, 5843,
5849, 5851, 5857, 5861, 5867, 5869, 5879, 5881, 5897, 5903, 5923, 5927, 5939, 5953, 5981, 5987,
6007, 6011, 6029, 6037, 6043, 6047, 6053, 6067, 6073, 6079, 6089, 6091, 6101, 6113, 6121, 6131,
6133, 6143, 6151, 6163, 6173, 6197, 6199, 6203, 6211, 6217, 6221, 6229, 6247, 6257, 6263, 6269,
6271, 6277, 6287, 6299, 6301, 6311, 6317, 6323, 6329, 6337, 6343, 6353, 6359, 6361, 6367, 6373,
6379, 6389, 6397, 6421, 6427, 6449, 6451, 6469, 6473, 6481, 6491, 6521, 6529, 6547, 6551, 6553,
6563, 6569, 6571, 6577, 6581, 6599, 6607, 6619, 6637, 6653, 6659, 6661, 6673, 6679, 6689, 6691,
6701, 6703, 6709, 6719, 6733, 6737, 6761, 6763, 6779, 6781, 6791, 6793, 6803, 6823, 6827, 6829,
6833, 6841, 6857, 6863, 6869, 6871, 6883, 6899, 6907, 6911, 6917, 6947, 6949, 6959, 6961, 6967,
6971, 6977, 6983, 6991, 6997, 7001, 7013, 7019, 7027, 7039, 7043, 7057, 7069, 7079, 7103, 7109,
7121, 7127, 7129, 7151, 7159, 7177, 7187, 7193, 7207, 7211, 7213, 7219, 7229, 7237, 7243, 7247,
7253, 7283, 7297, 7307, 7309, 7321, 7331, 7333, 7349, 7351, 7369, 7393, 7411, 7417, 7433, 7451,
7457, 7459, 7477, 7481, 7487, 7489, 7499, 7507, 7517, 7523, 7529, 7537, 7541, 7547, 7549, 7559,
7561, 7573, 7577, 7583, 7589, 7591, 7603, 7607, 7621, 7639, 7643, 7649, 7669, 7673, 7681, 7687,
7691, 7699, 7703, 7717, 7723, 7727, 7741, 7753, 7757, 7759, 7789, 7793, 7817, 7823, 7829, 7841,
7853, 7867, 7873, 7877, 7879, 7883, 7901, 7907, 7919, 7927, 7933, 7937, 7949, 7951, 7963, 7993,
8009, 8011, 8017, 8039, 8053, 8059, 8069, 8081, 8087, 8089, 8093, 8101, 8111, 8117, 8123, 8147,
8161, 8167, 8171, 8179, 8191, 16381, 32749, 65497, 130987, 261973, 523937, 1047859, 2095699,
4191391, 8382767, 16765531, 33531061, 67062103, 134124191, 268248367, 536496731, 1072993459,
2145986911, 4291973723, 8583947341, 17167894663, 34335789281, 68671578553, 137343157093,
274686314179, 549372628241, 1098745256473, 2197490512937, 4394981025781, 8789962051523,
17579924103031, 35159848206029, 70319696411981, 140639392823957, 281278785647903,
562557571295719, 1125115142591417, 2250230285182799, 4500460570365553, 9000921140731063,
18001842281462111, 36003684562924193, 72007369125848357, 144014738251696691, 288029476503393379,
576058953006786671, 1152117906013573337, 2304235812027146617, 4608471624054293231
];

/// Smallest table prime >= m. The table density guarantees the result is at
/// most 2m.
pub fn next_prime_at_least(m: u64) -> Result<u64> {
    if m < 2 {
        return Ok(2);
    }
    match PRIME_TABLE.binary_search(&m) {
        Ok(_) => Ok(m),
        Err(pos) => {
            if pos == PRIME_TABLE.len() {
                Err(Error::PrimeTableExhausted(m))
            } else {
                Ok(PRIME_TABLE[pos])
            }
        }
    }
}

/// Deterministic Miller-Rabin, exact for all u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Counter-based deterministic entropy source. Forking with distinct tags
/// yields independent streams; the same (seed, tag path) always reproduces.
#[derive(Debug, Clone, Copy)]
pub struct Entropy {
    state: u64,
}

impl Entropy {
    pub fn new(seed: u64) -> Entropy {
        Entropy {
            state: splitmix(seed ^ 0x9e37_79b9_7f4a_7c15),
        }
    }
    pub fn fork(&self, tag: u64) -> Entropy {
        Entropy {
            state: splitmix(self.state ^ splitmix(tag.wrapping_add(0x632b_e5ab))),
        }
    }
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.state)
    }
    pub fn raw(&self) -> u64 {
        self.state
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Spec of one pseudo-random constraint sequence: prime modulus n', c' blocks
/// of Delta+1 coefficients, and the valid range [1, m]. Values above m are
/// skipped by the cursor; since n' <= 2m that skips at most half the stream.
#[derive(Debug, Clone)]
pub struct PrgSpec {
    pub modulus: u64,
    pub degree: u32,
    pub copies: u32,
    pub range_limit: u64,
    pub coeffs: Vec<u64>, // copies * (degree + 1), block-major
}

impl PrgSpec {
    pub fn seq_len(&self) -> u64 {
        self.copies as u64 * self.modulus
    }
    /// Stored words for workspace accounting.
    pub fn words(&self) -> usize {
        self.coeffs.len() + 4
    }
}

/// Draw a fresh spec for a universe of m constraints. Deterministic in
/// `entropy`; coefficients are uniform on [0, n'-1].
pub fn fresh_spec(m: u64, degree: u32, copies: u32, entropy: Entropy) -> PrgSpec {
    assert!(m >= 1 && copies >= 1);
    let modulus = next_prime_at_least(m.max(2)).expect("constraint count within prime table range");
    let mut rng = entropy.rng();
    let k = (degree as usize + 1) * copies as usize;
    let coeffs = (0..k).map(|_| rng.gen_range(0..modulus)).collect();
    PrgSpec {
        modulus,
        degree,
        copies,
        range_limit: m,
        coeffs,
    }
}

/// X_i = 1 + (f_b(i) mod n') where b is the block of i. O(Delta) time,
/// O(1) extra workspace.
pub fn value_at(spec: &PrgSpec, i: u64) -> Result<u64> {
    let len = spec.seq_len();
    if i < 1 || i > len {
        return Err(Error::SeqIndexOutOfRange { index: i, len });
    }
    let n = spec.modulus;
    let block = ((i - 1) / n) as usize;
    let x = i % n;
    let w = spec.degree as usize + 1;
    let c = &spec.coeffs[block * w..(block + 1) * w];
    // Horner, highest coefficient first
    let mut acc: u64 = 0;
    for &a in c.iter().rev() {
        acc = (mul_mod(acc, x, n) + a) % n;
    }
    Ok(1 + acc)
}

/// Cursor over the sequence positions 1..=c'*n'.
#[derive(Debug, Clone)]
pub struct SeqCursor<'a> {
    pub spec: &'a PrgSpec,
    pub position: u64,
}

impl<'a> SeqCursor<'a> {
    pub fn new(spec: &'a PrgSpec) -> Self {
        SeqCursor { spec, position: 0 }
    }
}

/// Next in-range value, skipping values above range_limit. Exhaustion is a
/// value, not an error.
pub fn next_valid(cursor: &mut SeqCursor) -> Option<u64> {
    let len = cursor.spec.seq_len();
    while cursor.position < len {
        cursor.position += 1;
        let v = value_at(cursor.spec, cursor.position).expect("position in range");
        if v <= cursor.spec.range_limit {
            return Some(v);
        }
    }
    None
}

/// Paper-default polynomial degree for combinatorial dimension d.
pub fn default_degree(d: usize) -> u32 {
    (6 * d + 10) as u32
}

/// Paper-default copy count c' = 8 (5 + ceil(ln d))^2 for dimension d.
pub fn default_copies(d: usize) -> u32 {
    let k = 5 + (d as f64).ln().ceil().max(0.0) as u32;
    8 * k * k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_table_sound() {
        for w in PRIME_TABLE.windows(2) {
            assert!(w[1] > w[0]);
            assert!(w[1] <= 2 * w[0], "gap too wide at {}", w[0]);
        }
        for &p in PRIME_TABLE {
            assert!(is_prime(p), "{p} not prime");
        }
        assert!(*PRIME_TABLE.last().unwrap() >= 1 << 61);
    }

    #[test]
    fn next_prime_examples() {
        assert_eq!(next_prime_at_least(10).unwrap(), 11);
        assert_eq!(next_prime_at_least(2).unwrap(), 2);
        assert_eq!(next_prime_at_least(90).unwrap(), 97);
        assert_eq!(next_prime_at_least(6).unwrap(), 7);
        // result <= 2m across the whole range
        for m in [3u64, 100, 8191, 8192, 100_000, 1 << 40, 1 << 59] {
            let p = next_prime_at_least(m).unwrap();
            assert!(p >= m && p <= 2 * m, "m={m} p={p}");
        }
        assert!(next_prime_at_least(u64::MAX).is_err());
    }

    #[test]
    fn fresh_spec_deterministic() {
        let e = Entropy::new(42).fork(7);
        let a = fresh_spec(5, 3, 2, e);
        let b = fresh_spec(5, 3, 2, e);
        assert_eq!(a.modulus, 5);
        assert_eq!(a.coeffs, b.coeffs);
        let c = fresh_spec(6, 3, 2, e);
        assert_eq!(c.modulus, 7);
        assert_eq!(c.range_limit, 6);
    }

    #[test]
    fn value_at_constant_and_identity() {
        // constant polynomial 3 over n'=5: every value is 1+3
        let spec = PrgSpec {
            modulus: 5,
            degree: 2,
            copies: 1,
            range_limit: 5,
            coeffs: vec![3, 0, 0],
        };
        for i in 1..=5 {
            assert_eq!(value_at(&spec, i).unwrap(), 4);
        }
        // identity polynomial over n'=5 at i=7 needs two blocks
        let spec = PrgSpec {
            modulus: 5,
            degree: 2,
            copies: 2,
            range_limit: 5,
            coeffs: vec![0, 1, 0, 0, 1, 0],
        };
        assert_eq!(value_at(&spec, 7).unwrap(), 1 + (7 % 5));
        assert!(value_at(&spec, 11).is_err());
        assert!(value_at(&spec, 0).is_err());
    }

    #[test]
    fn cursor_skips_out_of_range() {
        // m=6, n'=7: skipped positions are exactly those where value = 7
        let e = Entropy::new(1).fork(2);
        let spec = fresh_spec(6, 4, 2, e);
        assert_eq!(spec.modulus, 7);
        let mut cur = SeqCursor::new(&spec);
        let mut got = Vec::new();
        while let Some(v) = next_valid(&mut cur) {
            got.push(v);
        }
        let mut expect = Vec::new();
        for i in 1..=spec.seq_len() {
            let v = value_at(&spec, i).unwrap();
            if v <= 6 {
                expect.push(v);
            } else {
                assert_eq!(v, 7);
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn cursor_never_skips_when_m_is_prime() {
        let spec = fresh_spec(7, 3, 3, Entropy::new(9).fork(1));
        assert_eq!(spec.modulus, 7);
        let mut cur = SeqCursor::new(&spec);
        let mut count = 0;
        while next_valid(&mut cur).is_some() {
            count += 1;
        }
        assert_eq!(count, spec.seq_len());
    }

    #[test]
    fn skip_fraction_at_most_half() {
        // n' <= 2m, so in expectation at most half the stream is skipped
        let mut total = 0u64;
        let mut kept = 0u64;
        for s in 0..200u64 {
            let m = 3 + s % 40;
            let spec = fresh_spec(m, 8, 2, Entropy::new(s).fork(3));
            for i in 1..=spec.seq_len() {
                total += 1;
                if value_at(&spec, i).unwrap() <= m {
                    kept += 1;
                }
            }
        }
        assert!(kept * 2 >= total, "kept {kept} of {total}");
    }

    #[test]
    fn uniform_marginals_chi_square() {
        // over many specs, Pr[X_i = j] should be 1/n' for each fixed i
        let n: u64 = 11;
        let trials = 20_000u64;
        let mut counts = vec![0u64; n as usize];
        for s in 0..trials {
            let spec = fresh_spec(n, 4, 1, Entropy::new(s).fork(11));
            let v = value_at(&spec, 4).unwrap();
            counts[(v - 1) as usize] += 1;
        }
        let expected = trials as f64 / n as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 10 dof, far tail at ~35; allow slack
        assert!(chi2 < 40.0, "chi2 = {chi2}");
    }

    #[test]
    fn pairwise_joint_uniform() {
        // degree >= 1 gives pairwise independence: joint of (X_i, X_j) uniform
        let n: u64 = 5;
        let trials = 40_000u64;
        let mut counts = vec![0u64; (n * n) as usize];
        for s in 0..trials {
            let spec = fresh_spec(n, 2, 1, Entropy::new(s).fork(13));
            let a = value_at(&spec, 1).unwrap() - 1;
            let b = value_at(&spec, 3).unwrap() - 1;
            counts[(a * n + b) as usize] += 1;
        }
        let expected = trials as f64 / (n * n) as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        // 24 dof; mean 24, sd ~7; stay within ~6 sigma
        assert!(chi2 < 66.0, "chi2 = {chi2}");
    }

    #[test]
    fn degree_one_shows_triple_dependence() {
        // a degree-1 spec is pairwise independent but triples are determined:
        // X_3 is a function of (X_1, X_2); verify the generator is exactly
        // (degree+1)-point-determined and not more.
        let n: u64 = 5;
        let mut seen = std::collections::HashMap::new();
        for s in 0..5_000u64 {
            let spec = fresh_spec(n, 1, 1, Entropy::new(s).fork(17));
            let a = value_at(&spec, 1).unwrap();
            let b = value_at(&spec, 2).unwrap();
            let c = value_at(&spec, 3).unwrap();
            let prev = seen.insert((a, b), c);
            if let Some(p) = prev {
                assert_eq!(p, c, "degree-1 triple not determined by pair");
            }
        }
    }

    #[test]
    fn paper_default_parameters() {
        assert_eq!(default_degree(4), 34);
        assert_eq!(default_copies(4), 392);
        assert_eq!(default_copies(1), 200);
    }
}
