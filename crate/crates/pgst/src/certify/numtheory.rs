//! Trial-division number theory for the certification path.
//!
//! The integers involved are tiny (eigenvalue numerators and `q^2`), so
//! trial division is the right tool.

/// Primality by trial division up to the square root.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3u64;
    while p.checked_mul(p).map_or(false, |sq| sq <= n) {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut push = |p: u64, e: u32| {
        if e > 0 {
            factors.push((p, e));
        }
    };
    let mut e = 0;
    while n % 2 == 0 {
        n /= 2;
        e += 1;
    }
    push(2, e);
    let mut p = 3u64;
    while p.checked_mul(p).map_or(false, |sq| sq <= n) {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        push(p, e);
        p += 2;
    }
    if n > 1 {
        push(n, 1);
    }
    factors
}

/// Product of the primes dividing `n` to an odd power.
pub fn square_free_part(n: u64) -> u64 {
    assert!(n >= 1, "square-free part needs n >= 1");
    factorize(n)
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product()
}

/// Binomial coefficient `C(n, k)` in checked 128-bit arithmetic.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
