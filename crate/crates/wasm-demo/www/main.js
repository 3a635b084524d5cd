import init, { normalize, differential, pageSvg } from "./pkg/lambda_sseq_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function show(out, f) {
  try {
    out.textContent = f();
    out.classList.remove("error");
  } catch (e) {
    out.textContent = e.message ?? String(e);
    out.classList.add("error");
  }
}

function draw() {
  $("chart-error").textContent = "";
  try {
    $("chart").innerHTML = pageSvg(num("prime"), num("sphere"), num("page"), num("max-m"), num("max-length"));
  } catch (e) {
    $("chart").innerHTML = "";
    $("chart-error").textContent = e.message ?? String(e);
  }
}

await init();
$("normalize").onclick = () => show($("result"), () => normalize(num("prime"), $("expr").value));
$("differential").onclick = () => show($("result"), () => differential(num("prime"), $("expr").value));
$("draw").onclick = draw;
draw();
