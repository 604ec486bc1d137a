//! Hard-decision Reed-Solomon over GF(2^m).
//!
//! Systematic encoding (message symbols first), generator with roots
//! alpha^1 .. alpha^(n-k), Berlekamp-Massey locator search, Chien root
//! finding and Forney magnitudes. A post-correction syndrome recheck turns
//! any inconsistent correction into a reported failure, which is the signal
//! retransmission protocols key on.

use super::gf::GfTables;
use crate::error::Error;
use crate::Result;

/// Decode outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RsStatus {
    /// Syndromes were zero on arrival.
    Clean,
    /// This many symbol errors were located and repaired.
    Corrected(usize),
    /// Decoding did not converge to a codeword.
    Failure,
}

impl RsStatus {
    pub fn is_ok(&self) -> bool {
        !matches!(self, RsStatus::Failure)
    }
}

/// One Reed-Solomon code instance with its field tables and generator.
#[derive(Debug, Clone)]
pub struct ReedSolomon {
    gf: GfTables,
    n: usize,
    k: usize,
    t: usize,
    generator: Vec<u16>,
}

impl ReedSolomon {
    /// Builds RS(n, k) over GF(2^m) with `n = 2^m - 1`.
    pub fn new(symbol_bits: u32, n: usize, k: usize) -> Result<Self> {
        let gf = GfTables::new(symbol_bits)?;
        if n != gf.order() {
            return Err(Error::param(
                "rs_n",
                format!("must equal 2^{symbol_bits} - 1 = {}", gf.order()),
            ));
        }
        if k == 0 || k >= n {
            return Err(Error::param("rs_k", "must satisfy 1 <= K < N"));
        }
        let t = (n - k) / 2;
        if t == 0 {
            return Err(Error::param(
                "rs_k",
                "N - K must be at least 2 so at least one symbol error is correctable",
            ));
        }
        // g(x) = prod_{j=1..n-k} (x - alpha^j), constant term first.
        let mut generator = vec![1u16];
        for j in 1..=(n - k) {
            generator = gf.poly_mul(&generator, &[gf.alpha_pow(j), 1]);
        }
        Ok(ReedSolomon { gf, n, k, t, generator })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Correctable symbol errors per codeword.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn symbol_bits(&self) -> u32 {
        self.gf.symbol_bits()
    }

    fn check_symbols(&self, symbols: &[u16], expected: usize, context: &'static str) -> Result<()> {
        if symbols.len() != expected {
            return Err(Error::LengthMismatch {
                context,
                expected,
                got: symbols.len(),
            });
        }
        let limit = 1u16 << self.gf.symbol_bits();
        if let Some(&bad) = symbols.iter().find(|&&s| s >= limit) {
            return Err(Error::param(
                "symbols",
                format!("value {bad} exceeds the {}-bit field", self.gf.symbol_bits()),
            ));
        }
        Ok(())
    }

    /// Systematic encode: `message` (k symbols) followed by n-k parity
    /// symbols. Codeword index 0 carries the highest polynomial power.
    pub fn encode(&self, message: &[u16]) -> Result<Vec<u16>> {
        self.check_symbols(message, self.k, "rs message")?;
        let nsym = self.n - self.k;
        let mut codeword = vec![0u16; self.n];
        codeword[..self.k].copy_from_slice(message);
        // Polynomial long division of message(x) * x^(n-k) by the generator.
        for i in 0..self.k {
            let coef = codeword[i];
            if coef != 0 {
                for j in 1..=nsym {
                    codeword[i + j] ^= self.gf.mul(self.generator[nsym - j], coef);
                }
            }
        }
        codeword[..self.k].copy_from_slice(message);
        Ok(codeword)
    }

    /// Syndromes `S_j = r(alpha^j)` for j = 1..=n-k; all zero iff `received`
    /// is a codeword.
    fn syndromes(&self, received: &[u16]) -> Vec<u16> {
        let nsym = self.n - self.k;
        (1..=nsym)
            .map(|j| {
                let mut acc = 0u16;
                for (idx, &sym) in received.iter().enumerate() {
                    if sym != 0 {
                        let power = self.n - 1 - idx;
                        acc ^= self.gf.mul(sym, self.gf.alpha_pow(j * power));
                    }
                }
                acc
            })
            .collect()
    }

    /// Berlekamp-Massey: shortest LFSR (error locator, constant term 1)
    /// generating the syndrome sequence.
    fn error_locator(&self, syn: &[u16]) -> Vec<u16> {
        let mut current = vec![1u16];
        let mut previous = vec![1u16];
        let mut degree = 0usize;
        let mut shift = 1usize;
        let mut last_discrepancy = 1u16;
        for r in 0..syn.len() {
            let mut discrepancy = syn[r];
            for i in 1..=degree.min(current.len() - 1) {
                discrepancy ^= self.gf.mul(current[i], syn[r - i]);
            }
            if discrepancy == 0 {
                shift += 1;
                continue;
            }
            let scale = self.gf.div(discrepancy, last_discrepancy);
            if 2 * degree <= r {
                let snapshot = current.clone();
                if current.len() < previous.len() + shift {
                    current.resize(previous.len() + shift, 0);
                }
                for (i, &p) in previous.iter().enumerate() {
                    current[i + shift] ^= self.gf.mul(scale, p);
                }
                degree = r + 1 - degree;
                previous = snapshot;
                last_discrepancy = discrepancy;
                shift = 1;
            } else {
                if current.len() < previous.len() + shift {
                    current.resize(previous.len() + shift, 0);
                }
                for (i, &p) in previous.iter().enumerate() {
                    current[i + shift] ^= self.gf.mul(scale, p);
                }
                shift += 1;
            }
        }
        while current.len() > 1 && *current.last().unwrap() == 0 {
            current.pop();
        }
        current
    }

    /// Hard-decision decode. Returns the message symbols (best effort: the
    /// received systematic portion when decoding fails) plus status.
    pub fn decode(&self, received: &[u16]) -> Result<(Vec<u16>, RsStatus)> {
        self.check_symbols(received, self.n, "rs codeword")?;
        let systematic = received[..self.k].to_vec();
        let syn = self.syndromes(received);
        if syn.iter().all(|&s| s == 0) {
            return Ok((systematic, RsStatus::Clean));
        }

        let sigma = self.error_locator(&syn);
        let num_errors = sigma.len() - 1;
        if num_errors == 0 || num_errors > self.t {
            return Ok((systematic, RsStatus::Failure));
        }

        // Chien search over all positions.
        let mut positions = Vec::with_capacity(num_errors);
        for idx in 0..self.n {
            let power = self.n - 1 - idx;
            let x_inv = self.gf.alpha_pow(self.gf.order() - power % self.gf.order());
            if self.gf.poly_eval(&sigma, x_inv) == 0 {
                positions.push(idx);
            }
        }
        if positions.len() != num_errors {
            return Ok((systematic, RsStatus::Failure));
        }

        // Forney: omega = S(x) sigma(x) mod x^(n-k); magnitudes from the
        // formal derivative of the locator.
        let nsym = self.n - self.k;
        let mut omega = vec![0u16; nsym];
        for i in 0..nsym {
            for (j, &sj) in sigma.iter().enumerate().take(i + 1) {
                omega[i] ^= self.gf.mul(syn[i - j], sj);
            }
        }
        let mut sigma_prime = vec![0u16; sigma.len().saturating_sub(1).max(1)];
        for i in (1..sigma.len()).step_by(2) {
            sigma_prime[i - 1] = sigma[i];
        }

        let mut corrected = received.to_vec();
        for &idx in &positions {
            let power = self.n - 1 - idx;
            let x_inv = self.gf.alpha_pow(self.gf.order() - power % self.gf.order());
            let denom = self.gf.poly_eval(&sigma_prime, x_inv);
            if denom == 0 {
                return Ok((systematic, RsStatus::Failure));
            }
            let magnitude = self.gf.div(self.gf.poly_eval(&omega, x_inv), denom);
            corrected[idx] ^= magnitude;
        }

        // Consistency recheck; an inconsistent correction is a failure, so a
        // wrong payload is never reported as clean.
        if self.syndromes(&corrected).iter().any(|&s| s != 0) {
            return Ok((systematic, RsStatus::Failure));
        }
        Ok((corrected[..self.k].to_vec(), RsStatus::Corrected(num_errors)))
    }
}
