use qsp_core::{
    attach_quadratic, generate as generate_instance, parse_dimacs_vertex_cover, parse_orlib_scp,
    write_native, GeneratorConfig,
};

use crate::args::{ConvertArgs, GenArgs, SourceFormat};
use crate::{read_file, write_file, CliError, Output};

pub fn generate(args: &GenArgs) -> Result<Output, CliError> {
    let config = GeneratorConfig::new(args.n, args.m, args.category.into(), args.seed)
        .with_density(args.density);
    let inst = generate_instance(&config).map_err(|e| match e {
        qsp_core::InstanceError::InvalidConfig(msg) => CliError::Usage(msg),
        other => other.into(),
    })?;
    write_file(&args.out, &write_native(&inst))?;
    Ok(Output::ok(format!(
        "wrote {} ({} rows, {} columns)\n",
        args.out.display(),
        inst.m(),
        inst.n()
    )))
}

pub fn convert(args: &ConvertArgs) -> Result<Output, CliError> {
    let text = read_file(&args.input)?;
    let parsed = match args.from {
        SourceFormat::Orlib => parse_orlib_scp(&text),
        SourceFormat::Dimacs => parse_dimacs_vertex_cover(&text),
    };
    let mut inst = parsed.map_err(|source| CliError::Parse {
        path: args.input.clone(),
        source,
    })?;
    if args.attach_quad {
        let config = GeneratorConfig::new(inst.n(), inst.m(), args.category.into(), args.seed);
        inst = attach_quadratic(&inst, &config)?;
    }
    write_file(&args.out, &write_native(&inst))?;
    Ok(Output::ok(format!(
        "wrote {} ({} rows, {} columns)\n",
        args.out.display(),
        inst.m(),
        inst.n()
    )))
}
