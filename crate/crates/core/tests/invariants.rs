use allspeed::driver::{compute_dt, Scheme, SchemeConfig, Stepper};
use allspeed::grid::{Boundary, Field, GridSpec, PrimitiveState};
use allspeed::io::{read_dump, write_dump};
use proptest::prelude::*;

const GAMMA: f64 = 1.4;
const N: usize = 8;

fn cell() -> impl Strategy<Value = PrimitiveState> {
    (0.5f64..2.0, -0.5f64..0.5, -0.5f64..0.5, 0.5f64..2.0)
        .prop_map(|(rho, u, v, p)| PrimitiveState::new(rho, u, v, p))
}

fn field_from(cells: &[PrimitiveState], bc: Boundary) -> Field {
    let spec = GridSpec::covering(N, N, (0.0, 1.0), (0.0, 1.0), bc).unwrap();
    Field::from_primitive_fn(spec, GAMMA, |i, j| cells[j as usize * N + i as usize])
}

fn step(scheme: Scheme, f: &Field, dt: f64) -> Field {
    let cfg = SchemeConfig::new(scheme, 0.0);
    Stepper::new(&cfg, f).unwrap().step(f, dt).unwrap()
}

/// Largest difference between `a` and the transpose of `b`.
fn max_diff_transposed(a: &Field, b: &Field) -> f64 {
    a.interior()
        .map(|(i, j, q)| {
            let r = b.get(j, i);
            [
                q.rho - r.rho,
                q.rho_u - r.rho_v,
                q.rho_v - r.rho_u,
                q.e - r.e,
            ]
            .iter()
            .fold(0.0f64, |m, d| m.max(d.abs()))
        })
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn periodic_steps_conserve_totals(cells in prop::collection::vec(cell(), N * N)) {
        let f = field_from(&cells, Boundary::Periodic);
        let dt = compute_dt(&f, 0.4, GAMMA).unwrap();
        let (t0, scale) = (f.totals(), f.abs_totals());
        for scheme in Scheme::EULER {
            let g = step(scheme, &f, dt);
            let t1 = g.totals();
            for k in 0..4 {
                prop_assert!((t1[k] - t0[k]).abs() <= 1e-13 * scale[k], "{scheme} component {k}");
            }
            g.validate(GAMMA).unwrap();
        }
    }

    #[test]
    fn multid_steps_commute_with_transposition(cells in prop::collection::vec(cell(), N * N)) {
        let f = field_from(&cells, Boundary::Periodic);
        let t: Vec<PrimitiveState> = (0..N * N)
            .map(|k| {
                let w = cells[(k % N) * N + k / N];
                PrimitiveState::new(w.rho, w.v, w.u, w.p)
            })
            .collect();
        let ft = field_from(&t, Boundary::Periodic);
        let dt = compute_dt(&f, 0.4, GAMMA).unwrap();
        for scheme in Scheme::EULER {
            let (g, gt) = (step(scheme, &f, dt), step(scheme, &ft, dt));
            let d = max_diff_transposed(&g, &gt);
            prop_assert!(d <= 1e-13, "{scheme}: {d:e}");
        }
    }

    #[test]
    fn mirrored_data_gives_mirrored_steps(cells in prop::collection::vec(cell(), N * N)) {
        let f = field_from(&cells, Boundary::Wall);
        let m: Vec<PrimitiveState> = (0..N * N)
            .map(|k| {
                let (i, j) = (k % N, k / N);
                let w = cells[j * N + (N - 1 - i)];
                PrimitiveState::new(w.rho, -w.u, w.v, w.p)
            })
            .collect();
        let fm = field_from(&m, Boundary::Wall);
        let dt = compute_dt(&f, 0.4, GAMMA).unwrap();
        let n = N as isize;
        for scheme in [Scheme::LpMultid, Scheme::RelaxMultid] {
            let (g, gm) = (step(scheme, &f, dt), step(scheme, &fm, dt));
            let d = g
                .interior()
                .map(|(i, j, q)| {
                    let r = gm.get(n - 1 - i, j);
                    [q.rho - r.rho, q.rho_u + r.rho_u, q.rho_v - r.rho_v, q.e - r.e]
                        .iter()
                        .fold(0.0f64, |acc, x| acc.max(x.abs()))
                })
                .fold(0.0, f64::max);
            prop_assert!(d <= 1e-13, "{scheme}: {d:e}");
        }
    }

    #[test]
    fn dumps_round_trip_exactly(cells in prop::collection::vec(cell(), N * N), time in 0.0f64..10.0) {
        let f = field_from(&cells, Boundary::Periodic);
        let mut buf = Vec::new();
        write_dump(&mut buf, &f, time).unwrap();
        let (g, t) = read_dump(buf.as_slice(), Boundary::Periodic, Boundary::Periodic).unwrap();
        prop_assert_eq!(t, time);
        prop_assert_eq!(g.spec(), f.spec());
        prop_assert_eq!(f.max_abs_diff(&g), 0.0);
    }
}

#[test]
fn uniform_flow_is_preserved_by_every_scheme() {
    let cells = vec![PrimitiveState::new(1.3, 0.4, -0.2, 0.9); N * N];
    let f = field_from(&cells, Boundary::Periodic);
    let dt = compute_dt(&f, 0.4, GAMMA).unwrap();
    for scheme in Scheme::EULER {
        let g = step(scheme, &f, dt);
        assert!(f.max_abs_diff(&g) <= 1e-14, "{scheme}");
    }
}

#[test]
fn truncated_dump_is_rejected() {
    let cells = vec![PrimitiveState::new(1.0, 0.0, 0.0, 1.0); N * N];
    let mut buf = Vec::new();
    write_dump(&mut buf, &field_from(&cells, Boundary::Periodic), 0.0).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let cut: String = text.lines().take(10).map(|l| format!("{l}\n")).collect();
    assert!(read_dump(cut.as_bytes(), Boundary::Periodic, Boundary::Periodic).is_err());
}
