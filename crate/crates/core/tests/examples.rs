macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(stringify!($module));
        }
    };
}

example!(hello_example, "hello_library.rs", hello_example_runs);
example!(local_data, "local_data.rs", local_data_runs);
example!(modular_symbols, "modular_symbols.rs", modular_symbols_runs);
example!(eigen_files, "eigen_files.rs", eigen_files_runs);
example!(kolyvagin_sieve, "kolyvagin_sieve.rs", kolyvagin_sieve_runs);
example!(kurihara_numbers, "kurihara_numbers.rs", kurihara_numbers_runs);
example!(selmer_structure, "selmer_structure.rs", selmer_structure_runs);
example!(local_torsion, "local_torsion.rs", local_torsion_runs);
example!(analyze_rank_two, "analyze_rank_two.rs", analyze_rank_two_runs);
example!(rank_three, "rank_three.rs", rank_three_runs);
