//! Symplectic algebra for single-qubit Pauli letters and N-qubit Pauli words.
//!
//! Words are stored unsigned: a `PauliWord` is a label for a Hermitian
//! observable, and all phase information produced by multiplication is
//! returned separately as a [`PhaseExponent`]. The phase convention is fixed
//! as `Y = i * X * Z`, so the letter products are `ZX = iY`, `XY = iZ`,
//! `YZ = iX`, with the reversed orders picking up `-i`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Largest supported qubit count; x/z components are packed into one `u64` each.
pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum PauliError {
    #[error("qubit counts differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("empty Pauli word")]
    Empty,
    #[error("illegal Pauli letter {found:?} at offset {offset}")]
    IllegalLetter { offset: usize, found: char },
    #[error("{n} qubits exceeds the supported maximum of {MAX_QUBITS}")]
    TooManyQubits { n: usize },
}

/// A single-qubit Pauli observable. The ordering `I < X < Y < Z` is the one
/// used by the text format and by canonical keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum PauliLetter {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];
    pub const NON_IDENTITY: [PauliLetter; 3] = [PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    /// Symplectic components: I=(0,0), X=(1,0), Y=(1,1), Z=(0,1).
    pub fn xz(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_xz(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliLetter::I
    }

    pub fn anticommutes(self, other: PauliLetter) -> bool {
        self != PauliLetter::I && other != PauliLetter::I && self != other
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Exponent k of the operator prefactor i^k, reduced mod 4.
/// k in {0, 2} is a real sign (+1 / -1); k in {1, 3} is imaginary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PhaseExponent(u8);

impl PhaseExponent {
    pub const ZERO: PhaseExponent = PhaseExponent(0);

    pub fn new(k: u8) -> Self {
        PhaseExponent(k & 3)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// Combine two prefactors: i^a * i^b = i^(a+b).
    pub fn combine(self, other: PhaseExponent) -> PhaseExponent {
        PhaseExponent((self.0 + other.0) & 3)
    }

    /// The real sign for k in {0, 2}; `None` for imaginary phases.
    pub fn sign(self) -> Option<Sign> {
        match self.0 {
            0 => Some(Sign::Plus),
            2 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for PhaseExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "+1"),
            1 => write!(f, "+i"),
            2 => write!(f, "-1"),
            _ => write!(f, "-i"),
        }
    }
}

/// A real sign, the only phase a Hermitian identity product can carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_negative(self) -> bool {
        self == Sign::Minus
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn combine(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// Product of two Pauli letters under the `Y = iXZ` convention:
/// returns `(k, c)` with `a * b = i^k * c`.
pub fn letter_product(a: PauliLetter, b: PauliLetter) -> (PhaseExponent, PauliLetter) {
    let (xa, za) = a.xz();
    let (xb, zb) = b.xz();
    let c = PauliLetter::from_xz(xa ^ xb, za ^ zb);
    let (xc, zc) = c.xz();
    // Writing each letter as i^(x z) X^x Z^z and commuting Z^za past X^xb:
    // k = xa*za + xb*zb - xc*zc + 2*za*xb (mod 4).
    let k = (xa & za) as i8 + (xb & zb) as i8 - (xc & zc) as i8 + 2 * (za & xb) as i8;
    (PhaseExponent::new(k.rem_euclid(4) as u8), c)
}

/// An unsigned N-qubit Pauli observable in bit-packed symplectic form.
/// Bit q of `x_bits`/`z_bits` holds the X/Z component of qubit q+1
/// (qubit 1 is the leftmost letter of the text form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x_bits: u64,
    z_bits: u64,
}

impl PauliWord {
    pub fn identity(n: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n), "qubit count {n} out of range");
        PauliWord { n, x_bits: 0, z_bits: 0 }
    }

    pub fn from_bits(n: usize, x_bits: u64, z_bits: u64) -> Result<Self, PauliError> {
        if n == 0 {
            return Err(PauliError::Empty);
        }
        if n > MAX_QUBITS {
            return Err(PauliError::TooManyQubits { n });
        }
        let mask = mask(n);
        Ok(PauliWord { n, x_bits: x_bits & mask, z_bits: z_bits & mask })
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Result<Self, PauliError> {
        if letters.is_empty() {
            return Err(PauliError::Empty);
        }
        if letters.len() > MAX_QUBITS {
            return Err(PauliError::TooManyQubits { n: letters.len() });
        }
        let mut x_bits = 0u64;
        let mut z_bits = 0u64;
        for (q, letter) in letters.iter().enumerate() {
            let (x, z) = letter.xz();
            x_bits |= (x as u64) << q;
            z_bits |= (z as u64) << q;
        }
        Ok(PauliWord { n: letters.len(), x_bits, z_bits })
    }

    /// A word with a single non-identity letter at `qubit` (0-based).
    pub fn single(n: usize, qubit: usize, letter: PauliLetter) -> Self {
        assert!(qubit < n, "qubit {qubit} out of range for {n} qubits");
        let (x, z) = letter.xz();
        PauliWord {
            n,
            x_bits: (x as u64) << qubit,
            z_bits: (z as u64) << qubit,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        PauliLetter::from_xz((self.x_bits >> qubit) & 1 == 1, (self.z_bits >> qubit) & 1 == 1)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n).map(|q| self.letter(q)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        (self.x_bits | self.z_bits).count_ones() as usize
    }

    /// Number of identity letters.
    pub fn identity_count(&self) -> usize {
        self.n - self.weight()
    }

    /// Keep only the letters at `qubits` (0-based, strictly increasing not
    /// required); the result is a word on `qubits.len()` qubits in the given
    /// order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliWord {
        assert!(!qubits.is_empty(), "restriction to zero qubits");
        let mut x_bits = 0u64;
        let mut z_bits = 0u64;
        for (i, &q) in qubits.iter().enumerate() {
            assert!(q < self.n);
            x_bits |= ((self.x_bits >> q) & 1) << i;
            z_bits |= ((self.z_bits >> q) & 1) << i;
        }
        PauliWord { n: qubits.len(), x_bits, z_bits }
    }

    /// Lexicographic order key over letter codes, qubit 1 most significant.
    /// Consistent with `Ord` and with the text form under `I < X < Y < Z`.
    pub fn order_key(&self) -> u128 {
        let mut key = 0u128;
        for q in 0..self.n {
            key = (key << 2) | self.letter(q) as u128;
        }
        key
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.order_key().cmp(&other.order_key()))
    }
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Product of two equal-length words: `a * b = i^k * w` with
/// `w.x = a.x ^ b.x`, `w.z = a.z ^ b.z` and k the sum of the per-qubit
/// letter phases mod 4.
pub fn word_product(a: &PauliWord, b: &PauliWord) -> Result<(PhaseExponent, PauliWord), PauliError> {
    if a.n != b.n {
        return Err(PauliError::DimensionMismatch { left: a.n, right: b.n });
    }
    Ok(word_product_unchecked(a, b))
}

pub(crate) fn word_product_unchecked(a: &PauliWord, b: &PauliWord) -> (PhaseExponent, PauliWord) {
    let xc = a.x_bits ^ b.x_bits;
    let zc = a.z_bits ^ b.z_bits;
    let k = (a.x_bits & a.z_bits).count_ones() as i64 + (b.x_bits & b.z_bits).count_ones() as i64
        - (xc & zc).count_ones() as i64
        + 2 * (a.z_bits & b.x_bits).count_ones() as i64;
    (
        PhaseExponent::new(k.rem_euclid(4) as u8),
        PauliWord { n: a.n, x_bits: xc, z_bits: zc },
    )
}

/// True iff the symplectic form vanishes mod 2, i.e. the two words
/// anticommute on an even number of their qubits.
pub fn commutes(a: &PauliWord, b: &PauliWord) -> Result<bool, PauliError> {
    if a.n != b.n {
        return Err(PauliError::DimensionMismatch { left: a.n, right: b.n });
    }
    Ok(commutes_unchecked(a, b))
}

#[inline]
pub(crate) fn commutes_unchecked(a: &PauliWord, b: &PauliWord) -> bool {
    ((a.x_bits & b.z_bits).count_ones() + (a.z_bits & b.x_bits).count_ones()).is_multiple_of(2)
}

impl FromStr for PauliWord {
    type Err = PauliError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        if text.is_empty() {
            return Err(PauliError::Empty);
        }
        let mut letters = Vec::with_capacity(text.len());
        for (offset, c) in text.chars().enumerate() {
            match PauliLetter::from_char(c) {
                Some(letter) => letters.push(letter),
                None => return Err(PauliError::IllegalLetter { offset, found: c }),
            }
        }
        PauliWord::from_letters(&letters)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}
