use dualrail::circuit_file::parse_circuit;
use dualrail::dump::operator_to_string;
use dualrail::AppError;
use dualrail_core::circuit::Gate;
use dualrail_core::evaluator::{evaluate_block, CircuitSpec, SourceModel};
use dualrail_core::fock::{FockOperator, ModeRegistry};
use dualrail_core::qubit::stokes_operator;
use dualrail_core::qubit::{DualRailQubit, Stokes};

const HEAD: &str = "qubits = 2\nobservable = [\"i\", \"z\"]\n";

fn parse(body: &str) -> Result<dualrail::circuit_file::CircuitFile, AppError> {
    parse_circuit(&format!("{HEAD}{body}"), "test.toml")
}

fn parse_message(body: &str) -> (usize, String) {
    match parse(body).unwrap_err() {
        AppError::Parse { line, message, .. } => (line, message),
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn custom_matrix_gate_equals_builtin() {
    let body = "xi = 0.4\n\
        [[gates]]\ntype = \"us\"\ntarget = 0\nparams = { alpha = 0.6 }\n\
        [[gates]]\ntype = \"custom\"\ntargets = [1]\n\
        matrix = [[[0.7071067811865476, 0], [0.7071067811865476, 0]], [[0.7071067811865476, 0], [-0.7071067811865476, 0]]]\n\
        [[gates]]\ntype = \"csign\"\ntargets = [0, 1]\n\
        [[gates]]\ntype = \"h\"\ntarget = 1\n";
    let file = parse(body).unwrap();
    assert!(matches!(file.spec.gates[1], Gate::Custom { .. }));
    let v = evaluate_block(&file.spec).unwrap();
    let reference = evaluate_block(&CircuitSpec::cnot_example(0.6, 0.4)).unwrap();
    assert!((v - reference).abs() < 1e-12);
}

#[test]
fn wavepacket_block_sets_xi() {
    let file = parse("[wavepacket]\ndx = 0.5\nsigma = 2.0\n").unwrap();
    assert!((file.spec.xi - (-1.0f64).exp()).abs() < 1e-8);
    assert_eq!(file.wavepacket, Some((0.5, 2.0)));
    assert!(parse("xi = 0.5\n[wavepacket]\ndx = 0.5\nsigma = 2.0\n").is_err());
}

#[test]
fn mbc_source_block() {
    let file = parse("[source]\nkind = \"mbc\"\nchi = 0.1\nn_sources = 3\n").unwrap();
    match file.spec.source {
        SourceModel::Mbc { params, truncation } => {
            assert_eq!((params.chi, params.n_sources, truncation), (0.1, 3, 4));
        }
        SourceModel::Ideal => panic!("expected mbc"),
    }
    assert!(parse("[source]\nkind = \"laser\"\n").is_err());
}

#[test]
fn errors_carry_positions_and_names() {
    let (line, msg) = parse_message("[[gates]]\ntype = \"cz\"\ntarget = 0\n");
    assert_eq!(line, 4);
    assert!(msg.contains("`cz`"), "{msg}");

    let (line, msg) = parse_message(
        "[[gates]]\ntype = \"h\"\ntarget = 0\n[[gates]]\ntype = \"zrot\"\ntarget = 1\n",
    );
    assert!(
        line >= 6 && msg.contains("gate 1") && msg.contains("theta"),
        "{line} {msg}"
    );

    let (_, msg) = parse_message("[[gates]]\ntype = \"csign\"\ntargets = [0, 0]\n");
    assert!(msg.contains("gate 0"), "{msg}");

    let (_, msg) = parse_message(
        "[[gates]]\ntype = \"custom\"\ntargets = [0]\nmatrix = [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]\n",
    );
    assert!(msg.contains("gate 0") && msg.contains("unitary"), "{msg}");

    let (line, _) = parse_message("[[gates]]\ntype = \"h\"\ntarget = \n");
    assert_eq!(line, 5);

    assert!(parse("[[gates]]\ntype = \"h\"\ntarget = 0\ncolour = 1\n").is_err());
    assert!(parse_circuit("qubits = 2\nobservable = [\"i\", \"w\"]\n", "t").is_err());
}

#[test]
fn operator_dump_is_sorted_and_round_trips() {
    let reg = std::sync::Arc::new(ModeRegistry::with_modes([("a", 2), ("b", 2)]).unwrap());
    let q = DualRailQubit::new(&reg, "a", "b").unwrap();
    let y = stokes_operator(q, Stokes::Y, &reg).unwrap();
    let text = operator_to_string(&y);
    let mut last = None;
    let mut triplets = Vec::new();
    for line in text.lines() {
        let f: Vec<&str> = line.split(' ').collect();
        let (r, c): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        assert!(last < Some((r, c)));
        last = Some((r, c));
        triplets.push((
            r,
            c,
            dualrail_core::C64::new(f[2].parse().unwrap(), f[3].parse().unwrap()),
        ));
    }
    let back = FockOperator::from_triplets(&reg, triplets).unwrap();
    assert_eq!(back.max_abs_diff(&y).unwrap(), 0.0);
}
