#!/usr/bin/env node
import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { MissingColumnsError, TableError } from "./csv.js";
import { FIGURES } from "./figures.js";
import { renderToFile } from "./run.js";

export async function main(argv: string[]): Promise<number> {
  const args = await yargs(argv)
    .scriptName("plots")
    .usage("$0 <figure> --in results.csv --out DIR")
    .command("$0 <figure>", "render one figure analogue from a results CSV")
    .positional("figure", { type: "string", describe: `one of ${Object.keys(FIGURES).join(", ")}` })
    .option("in", { type: "string", demandOption: true, describe: "results CSV produced by the simulator" })
    .option("out", { type: "string", default: ".", describe: "directory for the rendered SVG" })
    .option("log-y", { type: "boolean", default: false, describe: "logarithmic y axes" })
    .strict()
    .exitProcess(false)
    .fail((msg, err) => {
      throw err ?? new Error(msg);
    })
    .parseAsync();

  try {
    const target = renderToFile(String(args.figure), String(args.in), String(args.out),
                                { logY: Boolean(args.logY ?? args["log-y"]) });
    console.log(target);
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnsError || err instanceof TableError) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if (err instanceof Error && err.message.startsWith("unknown figure id")) {
      console.error(`error: ${err.message}`);
      return 2;
    }
    if ((err as NodeJS.ErrnoException)?.code === "ENOENT") {
      console.error(`error: cannot read input: ${(err as Error).message}`);
      return 2;
    }
    console.error(`error: ${(err as Error).message ?? err}`);
    return 3;
  }
}

const invokedDirectly = process.argv[1]?.endsWith("cli.js") || process.argv[1]?.endsWith("plots");
if (invokedDirectly) {
  main(hideBin(process.argv)).then((code) => {
    process.exitCode = code;
  });
}
