use proptest::prelude::*;

use pimwnn::analysis::{amplitude_spectrum, dft_magnitudes, relative_l2, spectrum_agreement_band, Spectrum};
use pimwnn::assembly::{assemble_block, DenseMatrix, LinearSystem, RowScaling};
use pimwnn::basis::{build_ladder, scaling_eval, TensorBasis};
use pimwnn::geometry::{sample_interior, Geometry, SamplingStrategy, StarRadius};
use pimwnn::lstsq::{solve_dense, SolveOptions};
use pimwnn::LinearOperator;

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (-3.0..3.0f64, 0.2..4.0f64).prop_map(|(lo, len)| (lo, lo + len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_functions_interpolate_at_their_nodes(j in 0i32..7, (lo, hi) in interval(), k in 0usize..128, m in 0usize..128) {
        let n = 1usize << j;
        let (k, m) = (k % n, m % n);
        let x = lo + m as f64 * (hi - lo) / n as f64;
        let v = scaling_eval(j, k as i64, x, lo, hi, 0).unwrap();
        let want = if k == m { 2f64.powf(j as f64 / 2.0) } else { 0.0 };
        prop_assert!((v - want).abs() < 1e-12, "phi_{j},{k}(x_{m}) = {v}");
    }

    #[test]
    fn tensor_row_on_one_axis_equals_eval_row(j0 in -2i32..2, extra in 0i32..4, (lo, hi) in interval(), t in 0.0..1.0f64, order in 0usize..3) {
        let axis = build_ladder(j0, j0 + extra, lo, hi).unwrap();
        let x = lo + t * (hi - lo);
        let row = axis.eval_row(x, order).unwrap();
        let tensor = TensorBasis::new(vec![axis]).unwrap();
        prop_assert_eq!(tensor.tensor_row(&[x], &[order]).unwrap(), row);
    }

    #[test]
    fn assembly_is_linear_in_the_operator(alpha in -3.0..3.0f64, seed in 0u64..1000) {
        let basis = TensorBasis::new(vec![build_ladder(0, 2, -1.0, 1.0).unwrap(), build_ladder(0, 1, 0.0, 2.0).unwrap()]).unwrap();
        let geom = Geometry::box_nd(vec![(-1.0, 1.0), (0.0, 2.0)]).unwrap();
        let pts = sample_interior(&geom, 30, SamplingStrategy::UniformRandom, seed).unwrap();
        let a = LinearOperator::derivative(vec![2, 0], 1.0).with_term(vec![0, 1], -2.0).unwrap();
        let b = LinearOperator::derivative(vec![1, 1], 0.5).with_term(vec![0, 0], 3.0).unwrap();
        let combined = assemble_block(&basis, &a.scaled(alpha).plus(&b).unwrap(), &pts).unwrap();
        let (ma, mb) = (assemble_block(&basis, &a, &pts).unwrap(), assemble_block(&basis, &b, &pts).unwrap());
        for ((c, x), y) in combined.as_slice().iter().zip(ma.as_slice()).zip(mb.as_slice()) {
            let want = alpha * x + y;
            prop_assert!((c - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn random_sampling_is_deterministic_and_inside(seed in any::<u64>(), n in 1usize..200) {
        let flower = Geometry::star([(0.0, 1.0), (0.0, 1.0)], (0.5, 0.5), StarRadius { base: 0.2, amplitude: 0.15, lobes: 5 }).unwrap();
        let a = sample_interior(&flower, n, SamplingStrategy::UniformRandom, seed).unwrap();
        let b = sample_interior(&flower, n, SamplingStrategy::UniformRandom, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), n);
        prop_assert!(a.iter().all(|p| flower.contains(p)));
    }

    #[test]
    fn least_squares_residual_is_orthogonal(seed in any::<u64>(), rows in 8usize..40, cols in 1usize..8) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..rows).map(|_| rng.random_range(-1.0..1.0)).collect();
        let m = DenseMatrix::from_row_major(rows, cols, data).unwrap();
        let (u, report) = solve_dense(&m, &b, SolveOptions::default()).unwrap();
        prop_assume!(report.condition_estimate < 1e8);
        let mu = m.mul_vec(&u.values).unwrap();
        let r: Vec<f64> = mu.iter().zip(&b).map(|(a, b)| a - b).collect();
        let g = m.tr_mul_vec(&r).unwrap();
        let bound = 1e-8 * m.frobenius_norm() * b.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(g.iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn unit_row_scaling_keeps_consistent_solutions(seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let (rows, cols) = (12, 4);
        let data: Vec<f64> = (0..rows * cols).map(|i| rng.random_range(-1.0..1.0) * (1.0 + (i / cols) as f64).powi(3)).collect();
        let truth: Vec<f64> = (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let matrix = DenseMatrix::from_row_major(rows, cols, data).unwrap();
        let rhs = matrix.mul_vec(&truth).unwrap();
        let mut sys = LinearSystem { matrix, rhs, blocks: Vec::new() };
        sys.rescale_rows(RowScaling::UnitNorm);
        for i in 0..rows {
            let n: f64 = sys.matrix.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((n - 1.0).abs() < 1e-14);
        }
        let (u, _) = solve_dense(&sys.matrix, &sys.rhs, SolveOptions::default()).unwrap();
        for (a, b) in u.values.iter().zip(&truth) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn relative_error_is_scale_equivariant(u in prop::collection::vec(-10.0..10.0f64, 1..50), alpha in prop_oneof![-1e3..-1e-3f64, 1e-3..1e3f64], shift in -1.0..1.0f64) {
        let v: Vec<f64> = u.iter().map(|x| x + shift + 1.0).collect();
        let base = relative_l2(&u, &v).unwrap();
        let su: Vec<f64> = u.iter().map(|x| alpha * x).collect();
        let sv: Vec<f64> = v.iter().map(|x| alpha * x).collect();
        let scaled = relative_l2(&su, &sv).unwrap();
        prop_assert!((scaled - base).abs() <= 1e-13 * base.max(1.0));
    }

    #[test]
    fn parseval(samples in prop::collection::vec(-5.0..5.0f64, 2..300)) {
        let m = samples.len() as f64;
        let energy: f64 = samples.iter().map(|x| x * x).sum();
        let spectral: f64 = dft_magnitudes(&samples).iter().map(|a| a * a).sum();
        prop_assert!((spectral - m * energy).abs() <= 1e-10 * (m * energy).max(1e-300));
        prop_assert_eq!(amplitude_spectrum(&samples).unwrap().len(), samples.len() / 2 + 1);
    }

    #[test]
    fn band_shrinks_as_tolerance_tightens(amps in prop::collection::vec(0.0..1.0f64, 2..60), noise in prop::collection::vec(-0.5..0.5f64, 60), t1 in 0.0..1.0f64, t2 in 0.0..1.0f64) {
        let (tight, loose) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let exact = Spectrum { wavenumbers: (0..amps.len()).collect(), amplitudes: amps.clone() };
        let numeric = Spectrum { wavenumbers: exact.wavenumbers.clone(), amplitudes: amps.iter().zip(&noise).map(|(a, n)| a * (1.0 + n)).collect() };
        let rank = |b: Option<usize>| b.map_or(-1, |k| k as i64);
        let bt = rank(spectrum_agreement_band(&exact, &numeric, tight).unwrap());
        let bl = rank(spectrum_agreement_band(&exact, &numeric, loose).unwrap());
        prop_assert!(bt <= bl);
    }
}
