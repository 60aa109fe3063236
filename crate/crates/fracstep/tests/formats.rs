use fracstep::formats::{
    check_csv, convergence_csv, pcfn_from_table, pcfn_to_table, trace_csv, CheckRow, CHECK_HEADER,
    CONVERGENCE_HEADER, TRACE_HEADER,
};
use fracstep_core::splitting::ConvRow;
use fracstep_core::{PcFn, State};
use proptest::prelude::*;

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap()
}

#[test]
fn headers_match_the_report_contract() {
    assert_eq!(CONVERGENCE_HEADER, "s,t,distance,slope,bound,pass");
    assert_eq!(CHECK_HEADER, "check,parameter,value,bound,pass");
    assert_eq!(
        TRACE_HEADER,
        "t,v,q,upsilon,upsilon_before_source,v_before_source,tv,l1,fronts,bound"
    );
    assert_eq!(first_line(&convergence_csv(&[])), CONVERGENCE_HEADER);
    assert_eq!(first_line(&check_csv(&[])), CHECK_HEADER);
    assert_eq!(first_line(&trace_csv(&[])), TRACE_HEADER);
}

#[test]
fn csv_cells_carry_seventeen_digits() {
    let row = ConvRow {
        s: 0.1,
        t: 1.0 / 3.0,
        distance: 1e-7,
        slope: 2.0,
        bound: 1.9,
        pass: true,
    };
    let csv = convergence_csv(&[row]);
    let line = csv.lines().nth(1).unwrap();
    let cells: Vec<&str> = line.split(',').collect();
    assert_eq!(cells.len(), 6);
    assert_eq!(cells[1], "3.3333333333333331e-1");
    assert_eq!(cells[1].parse::<f64>().unwrap(), 1.0 / 3.0);
    assert_eq!(cells[5], "true");
}

#[test]
fn check_rows_render_non_finite_values() {
    let row = CheckRow {
        check: "distance".into(),
        parameter: 1.0,
        value: 0.5,
        bound: f64::NAN,
        pass: false,
    };
    let csv = check_csv(&[row]);
    assert_eq!(
        csv.lines().nth(1).unwrap(),
        "distance,1.0000000000000000e0,5.0000000000000000e-1,NaN,false"
    );
}

#[test]
fn table_rejects_nonzero_tail() {
    assert!(pcfn_from_table("# pcfn dim=1\n0.0 | 1.0\n").is_err());
    assert!(pcfn_from_table("0.0 | 1.0\n").is_err());
    assert!(pcfn_from_table("# pcfn dim=2\n0.0 | 1.0\n1.0 | 0 0\n").is_err());
}

#[test]
fn empty_table_is_zero() {
    let u = pcfn_from_table(&pcfn_to_table(&PcFn::zero(3))).unwrap();
    assert_eq!(u, PcFn::zero(3));
}

fn arb_pcfn() -> impl Strategy<Value = PcFn> {
    (1usize..=3, prop::collection::vec(-1e3f64..1e3, 2..12)).prop_flat_map(|(dim, mut xs)| {
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let n = xs.len() - 1;
        prop::collection::vec(prop::collection::vec(-1e6f64..1e6, dim), n).prop_map(move |vs| {
            let mut vals = vec![State::zeros(dim)];
            vals.extend(vs.iter().map(|v| State::from_slice(v)));
            vals.push(State::zeros(dim));
            PcFn::new(dim, xs.clone(), vals).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn table_round_trip_is_bit_exact(u in arb_pcfn()) {
        let text = pcfn_to_table(&u);
        let back = pcfn_from_table(&text).unwrap();
        prop_assert_eq!(back.breaks().len(), u.breaks().len());
        for (a, b) in back.breaks().iter().zip(u.breaks()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in back.values().iter().zip(u.values()) {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        prop_assert_eq!(pcfn_to_table(&back), text);
    }
}
