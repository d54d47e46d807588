#!/usr/bin/env node
import { promises as fs } from "node:fs";

import yargs from "yargs";
import { hideBin } from "yargs/helpers";

import { createBackends } from "./backends.js";
import { AdapterConfig, DEFAULT_CONFIG, adaptDirectory } from "./pipeline.js";
import { AdapterInputError, AdapterRuntimeError } from "./types.js";

async function main(): Promise<number> {
  const argv = await yargs(hideBin(process.argv))
    .command("adapt", "convert images to skeleton + intrinsics interchange")
    .demandCommand(1)
    .option("images", { type: "string", demandOption: true, describe: "image directory" })
    .option("out", { type: "string", demandOption: true, describe: "output directory" })
    .option("backend", { type: "string", default: "fixture" })
    .option("config", { type: "string", describe: "JSON config file" })
    .strict()
    .parse();

  let config: AdapterConfig = { ...DEFAULT_CONFIG };
  let fixtureSuffix: string | undefined;
  if (argv.config) {
    const doc = JSON.parse(await fs.readFile(argv.config, "utf-8"));
    config = { ...config, ...doc };
    fixtureSuffix = doc.fixtureSuffix;
  }

  try {
    const backends = createBackends(argv.backend, fixtureSuffix);
    const summary = await adaptDirectory(argv.images, argv.out, backends, config);
    console.log(
      `adapted ${summary.images} image(s), ${summary.people} person(s) -> ${argv.out}`,
    );
    if (summary.incompleteIntrinsics.length > 0) {
      console.warn(
        `warning: incomplete intrinsics for: ${summary.incompleteIntrinsics.join(", ")}`,
      );
    }
    return 0;
  } catch (err) {
    if (err instanceof AdapterInputError) {
      console.error(`input error: ${err.message}`);
      return 2;
    }
    if (err instanceof AdapterRuntimeError) {
      console.error(`runtime error: ${err.message}`);
      return 1;
    }
    throw err;
  }
}

main().then((code) => {
  process.exitCode = code;
});
