"""Curated bank of parameterized AIML lab templates.

Question skeletons are tiered by difficulty and filled with slot draws
(task clause, dataset, metric, hyperparameter, split, variation clause).
Each topic carries a paired answer skeleton so every generated question
ships with a rubric answer, plus a handful of viva question/answer pairs.
"""

from __future__ import annotations

import re

_NORMALIZE_RE = re.compile(r"[^a-z0-9]+")


def normalize_keyword(keyword: str) -> str:
    return _NORMALIZE_RE.sub(" ", keyword.lower()).strip()


DATASETS = (
    "the Iris flower dataset",
    "the Wine quality dataset",
    "the Breast Cancer Wisconsin dataset",
    "the MNIST digit images",
    "the Fashion-MNIST images",
    "the CIFAR-10 images",
    "the Titanic passenger manifest",
    "the California housing table",
    "the Pima diabetes records",
    "the Palmer penguins measurements",
    "the handwritten Digits 8x8 dataset",
    "the 20 Newsgroups corpus",
    "the IMDB review corpus",
    "the SMS spam collection",
    "the Bank marketing dataset",
    "the Cleveland heart disease dataset",
    "the Abalone ring measurements",
    "the Auto MPG dataset",
    "the Seeds kernel dataset",
    "the Sonar returns dataset",
    "the Ionosphere radar dataset",
    "the Glass identification dataset",
    "the Yeast protein localization dataset",
    "the Adult census income dataset",
)

METRICS = (
    "accuracy",
    "macro-averaged F1",
    "precision and recall per class",
    "a full confusion matrix",
    "ROC-AUC",
    "mean absolute error",
    "root mean squared error",
    "the R-squared score",
    "log-loss",
    "balanced accuracy",
)

SPLITS = ("70/30", "80/20", "75/25", "90/10")

VARIATIONS = (
    "Compare your implementation against a library baseline and explain any disagreement you find",
    "Plot how the validation score changes as the key hyperparameter sweeps across five values",
    "Report wall-clock training time and discuss the main computational bottleneck you observed",
    "Add five-fold cross-validation and report the fold-to-fold spread of your scores",
    "Standardize all features first and quantify how much the scaling changes the outcome",
    "Inject ten percent label noise and measure how gracefully the model degrades",
    "Shrink the training set to one quarter of its size and chart the resulting learning curve",
    "Handle missing values explicitly and justify the imputation strategy you chose",
    "Visualize the decision surface over the two most informative features",
    "Close with a short reflection on where the model fails and propose one concrete fix",
    "Seed every source of randomness and demonstrate that two runs reproduce identical numbers",
    "Log every intermediate result to a CSV file so the experiment can be audited later",
    "Wrap the final model behind a small command-line interface that scores a new sample",
    "Profile memory consumption during training and identify the single largest allocation",
    "Write unit tests that pin the behaviour of at least three helper functions",
    "Contrast the result with a trivial majority-class or mean predictor to establish a floor",
    "Rerun the experiment on a stratified subsample and discuss any distribution shift",
    "Check calibration by comparing predicted confidence against observed frequency in bins",
    "Document the time complexity of each stage directly in the docstrings",
    "Export the trained parameters to JSON and reload them in a fresh process before scoring",
    "Measure how sensitive the result is to the random train/test partition by repeating it ten times",
    "Identify the three most influential input features and defend your attribution method",
    "Convert the core loop to vectorized numpy and report the speed-up you achieved",
    "Describe one realistic deployment concern for this model and how you would mitigate it",
)

EASY_QUESTION_FORMS = (
    "Implement {keyword} from scratch in Python to {task}. Train on {dataset} with {hyper} and report {metric} on a {split} train/test split. {variation}.",
    "Write a Python program that loads {dataset} and uses {keyword} to {task}. Configure it with {hyper}, evaluate using {metric}, and keep the code under one hundred lines. {variation}.",
    "Build a small {keyword} pipeline on {dataset}: preprocess the data, {task}, and print {metric} for a {split} split. Use {hyper}. {variation}.",
    "Using only numpy and the standard library, apply {keyword} to {dataset} in order to {task}. Fix {hyper}, measure {metric}, and comment every major step. {variation}.",
    "Create a notebook-style script in which {keyword} is used to {task} on {dataset}. Set {hyper}, report {metric} after a {split} split, and summarize what the numbers mean. {variation}.",
)

MEDIUM_QUESTION_FORMS = (
    "Implement {keyword} in Python to {task} on {dataset}. Tune {hyper} against a validation split, evaluate with {metric}, and justify the configuration you keep. {variation}.",
    "Engineer features for {dataset} and train a {keyword} model to {task}. Start from {hyper}, search at least four alternatives, and chart {metric} for each. {variation}.",
    "Design an experiment on {dataset} where {keyword} must {task}. Hold {hyper} fixed but vary the training set size across four levels and tabulate {metric}. {variation}.",
    "Write a reusable module with a clean fit/predict interface whose {keyword} core can {task}. Benchmark it on {dataset} with {hyper} and report {metric} plus its spread over five random seeds. {variation}.",
    "Combine {keyword} with a preprocessing stage of your choice to {task} on {dataset}. Explain why {hyper} is appropriate and quantify the whole pipeline with {metric}. {variation}.",
)

HARD_QUESTION_FORMS = (
    "Implement {keyword} from first principles to {task} on {dataset}, then profile the code and optimize its hottest loop. Use {hyper}, report {metric}, and include a complexity analysis. {variation}.",
    "Build a robust {keyword} system that can {task} even when {dataset} is corrupted with noisy labels. Calibrate {hyper}, report {metric} before and after corruption, and analyze the gap. {variation}.",
    "Derive the update rules behind {keyword}, implement them to {task}, and validate on {dataset} against {metric}. Expose {hyper} as a command-line argument and discuss convergence. {variation}.",
    "Treat {dataset} as a streaming source and adapt {keyword} to {task} incrementally. Keep memory bounded, use {hyper}, and track {metric} over the stream. {variation}.",
    "Reimplement {keyword} to {task} on {dataset} and stress-test it with adversarial row ordering, duplicated rows, and missing columns. Report {metric} for each stress case using {hyper}. {variation}.",
)

QUESTION_FORMS_BY_TIER = {
    "Easy": EASY_QUESTION_FORMS,
    "Medium": MEDIUM_QUESTION_FORMS,
    "Hard": HARD_QUESTION_FORMS,
}

ANSWER_FORM = (
    "Reference solution for the {keyword} task on {dataset}.\n"
    "{code}\n"
    "Evaluation: use {hyper}, score with {metric}, and remember to {task}.\n"
    "Grading notes: {notes} Also expected: {variation_note}.\n"
)


class TopicSpec:
    """Static description of one lab topic in the bank."""

    def __init__(self, name, aliases, tasks, hypers, answer_code, answer_notes, viva):
        self.name = name
        self.aliases = tuple(normalize_keyword(a) for a in aliases)
        self.tasks = tasks  # tier -> tuple of task clauses
        self.hypers = tuple(hypers)
        self.answer_code = answer_code
        self.answer_notes = answer_notes
        self.viva = tuple(viva)  # (question form, rubric answer form)


TOPICS = (
    TopicSpec(
        name="decision tree",
        aliases=("decision tree", "decision trees", "cart", "classification tree"),
        tasks={
            "Easy": (
                "classify samples by walking from the root to a leaf",
                "predict the class label with a depth-limited tree",
                "separate two classes with greedy impurity splits",
            ),
            "Medium": (
                "compare Gini and entropy splitting on the same data",
                "prune an overgrown tree and measure the generalization gain",
                "handle both numeric and categorical columns in one tree",
            ),
            "Hard": (
                "implement cost-complexity pruning with its full alpha path",
                "grow the tree breadth-first under a strict node budget",
                "support missing feature values with surrogate splits",
            ),
        },
        hypers=(
            "maximum depth 3",
            "maximum depth 5",
            "minimum leaf size 4",
            "minimum leaf size 8",
            "Gini impurity splitting",
            "entropy splitting",
            "a minimum information gain of 0.01",
            "a node budget of 31 nodes",
        ),
        answer_code=(
            "import numpy as np\n"
            "def gini(labels):\n"
            "    _, counts = np.unique(labels, return_counts=True)\n"
            "    p = counts / counts.sum()\n"
            "    return 1.0 - (p ** 2).sum()\n"
            "def best_split(X, y):\n"
            "    # scan features and thresholds, keep the split with lowest weighted impurity\n"
            "    ...\n"
            "def build(X, y, depth):\n"
            "    # stop on purity, depth, or minimum leaf size; otherwise recurse on both halves\n"
            "    ..."
        ),
        answer_notes=(
            "split search must be exhaustive over candidate thresholds; leaves predict the "
            "majority class; the depth or leaf-size stop must be enforced."
        ),
        viva=(
            (
                "Why does an unconstrained {keyword} usually overfit, and which two controls curb it?",
                "An unconstrained tree keeps splitting until leaves are pure, memorizing noise in the training data. Limiting depth and requiring a minimum number of samples per leaf both stop the tree before it carves out single-sample regions, trading a little bias for much lower variance.",
            ),
            (
                "Explain how information gain decides a split in a {keyword}.",
                "Information gain is the parent node impurity minus the weighted impurity of the two children. The split search evaluates candidate thresholds for every feature and keeps the one with the largest gain, meaning the children are as pure as possible after the split.",
            ),
            (
                "When would you prefer a {keyword} over a linear model?",
                "When the decision boundary is axis-aligned and nonlinear, when features interact in threshold-like ways, or when interpretability as explicit rules matters. Trees need no feature scaling and handle mixed feature types naturally, while linear models assume an additive linear structure.",
            ),
            (
                "What does pruning do to a trained {keyword} and why does it help?",
                "Pruning removes subtrees whose complexity is not justified by their error reduction, replacing them with leaves. It shrinks variance and improves generalization because deep branches often fit noise; cost-complexity pruning does this by penalizing the leaf count with an alpha term.",
            ),
        ),
    ),
    TopicSpec(
        name="random forest",
        aliases=("random forest", "random forests", "bagged trees", "bagging ensemble"),
        tasks={
            "Easy": (
                "average many bootstrapped trees into one prediction",
                "classify samples with a majority vote over an ensemble",
                "reduce single-tree variance with bagging",
            ),
            "Medium": (
                "measure out-of-bag error instead of a held-out split",
                "rank features by permutation importance",
                "study how ensemble size changes the error curve",
            ),
            "Hard": (
                "implement proximity-based outlier scoring from the forest",
                "parallelize tree construction and prove the result unchanged",
                "calibrate the vote fractions into usable probabilities",
            ),
        },
        hypers=(
            "50 trees",
            "100 trees",
            "200 trees",
            "a per-split feature sample of sqrt(d)",
            "a per-split feature sample of d/3",
            "bootstrap samples of 80 percent",
            "unlimited tree depth",
            "a minimum leaf size of 2",
        ),
        answer_code=(
            "import numpy as np\n"
            "def bootstrap(rng, n):\n"
            "    return rng.integers(0, n, size=n)\n"
            "class Forest:\n"
            "    def fit(self, X, y):\n"
            "        # draw a bootstrap sample per tree, restrict each split to a random feature subset\n"
            "        ...\n"
            "    def predict(self, X):\n"
            "        # majority vote (classification) or mean (regression) across trees\n"
            "        ..."
        ),
        answer_notes=(
            "each tree must see its own bootstrap sample; split-time feature subsampling is what "
            "decorrelates the trees; the aggregate vote or mean is the final prediction."
        ),
        viva=(
            (
                "Why does a {keyword} outperform a single decision tree on most tabular data?",
                "Averaging many deep, decorrelated trees keeps their low bias while the vote cancels much of their variance. Bootstrap sampling plus random feature subsets make the trees disagree on noise, so errors average out instead of compounding.",
            ),
            (
                "What is out-of-bag evaluation in a {keyword}?",
                "Each bootstrap sample leaves out roughly a third of the rows, so every row can be scored by the trees that never saw it. Aggregating those predictions gives an honest generalization estimate without reserving a separate validation set.",
            ),
            (
                "How does limiting the features considered per split change a {keyword}?",
                "It decorrelates the trees: if one strong feature dominated, every tree would choose it and their errors would be correlated. Restricting each split to a random subset forces diversity, which lowers the variance of the averaged ensemble at a small cost in per-tree quality.",
            ),
            (
                "How would you estimate feature importance from a trained {keyword}?",
                "Either accumulate the impurity reduction each feature contributes across all splits, or permute one feature at a time in held-out data and measure how much the score drops. Permutation importance is slower but less biased toward high-cardinality features.",
            ),
        ),
    ),
    TopicSpec(
        name="k-nearest neighbors",
        aliases=("knn", "k nn", "k nearest neighbors", "k nearest neighbbors", "k nearest neighbour", "k nearest neighbours", "nearest neighbors", "nearest neighbour"),
        tasks={
            "Easy": (
                "classify unseen samples with a majority vote of the nearest neighbours",
                "predict labels directly from distances with no training phase",
                "label each query point from its closest stored examples",
            ),
            "Medium": (
                "add distance-weighted voting and compare it with the plain vote",
                "select k by cross-validation and plot the score curve",
                "compare Euclidean and Manhattan metrics on the same split",
            ),
            "Hard": (
                "build a KD-tree index so neighbour lookup beats the brute-force scan",
                "implement condensed nearest neighbour editing to shrink the stored set",
                "handle a million-row reference set within a fixed memory budget",
            ),
        },
        hypers=(
            "k=3",
            "k=5",
            "k=7",
            "k=9",
            "k=11",
            "distance-weighted votes",
            "the Manhattan distance",
            "the Euclidean distance",
        ),
        answer_code=(
            "import numpy as np\n"
            "from collections import Counter\n"
            "def predict_one(train_X, train_y, x, k):\n"
            "    d = np.sqrt(((train_X - x) ** 2).sum(axis=1))\n"
            "    nearest = np.argsort(d)[:k]\n"
            "    return Counter(train_y[nearest]).most_common(1)[0][0]"
        ),
        answer_notes=(
            "distances must be computed against the full training set; ties in the vote need a "
            "deterministic rule; features should be scaled before distances are meaningful."
        ),
        viva=(
            (
                "Why does increasing k in {keyword} usually smooth the decision boundary?",
                "A larger k averages the vote over more neighbours, so isolated noisy points stop flipping predictions. The boundary then follows broad regions of the feature space rather than individual samples: bias goes up slightly while variance drops.",
            ),
            (
                "Why is feature scaling critical for {keyword}?",
                "The method is driven entirely by distances. A feature measured in thousands dominates one measured in fractions, so without standardization the nearest neighbours are chosen by the large-scale feature alone and the rest of the data is effectively ignored.",
            ),
            (
                "What is the computational cost profile of {keyword} and where does it bite?",
                "Training is free since the data is just stored, but every query costs a scan over all n stored points, O(n*d) per prediction. It bites at inference time on large reference sets, which is why KD-trees, ball trees, or approximate indexes are used.",
            ),
            (
                "When does distance-weighted voting help {keyword}?",
                "When the right class sits close but is outnumbered within the k-ball by a more diffuse class. Weighting each vote by inverse distance lets near neighbours dominate far ones, which softens poor choices of k and helps on unevenly dense data.",
            ),
        ),
    ),
    TopicSpec(
        name="support vector machine",
        aliases=("svm", "support vector machine", "support vector machines", "svc", "maximum margin classifier"),
        tasks={
            "Easy": (
                "separate two classes with a maximum-margin line",
                "classify points using a trained linear separator",
                "find the widest margin between two point clouds",
            ),
            "Medium": (
                "compare a linear kernel with an RBF kernel on the same data",
                "trace how the soft-margin penalty changes the support set",
                "tune the regularization constant against a validation split",
            ),
            "Hard": (
                "implement the SMO-style coordinate updates for the dual problem",
                "derive and verify the hinge-loss subgradient training path",
                "approximate an RBF kernel with random Fourier features at scale",
            ),
        },
        hypers=(
            "a linear kernel",
            "an RBF kernel with gamma 0.1",
            "an RBF kernel with gamma 1.0",
            "penalty C=0.1",
            "penalty C=1",
            "penalty C=10",
            "a polynomial kernel of degree 3",
            "hinge loss and plain subgradient descent",
        ),
        answer_code=(
            "import numpy as np\n"
            "def hinge_step(w, b, x, y, C, lr):\n"
            "    margin = y * (w @ x + b)\n"
            "    if margin < 1:\n"
            "        w -= lr * (w - C * y * x)\n"
            "        b += lr * C * y\n"
            "    else:\n"
            "        w -= lr * w\n"
            "    return w, b"
        ),
        answer_notes=(
            "the margin condition decides whether the hinge term is active; support vectors are "
            "the points with margin at most one; C trades margin width against violations."
        ),
        viva=(
            (
                "What makes a point a support vector in a trained {keyword}?",
                "Only the points that lie on or inside the margin carry nonzero dual weight; they alone determine the separating hyperplane. Every other point could be removed without changing the solution, which is why the model is sparse in the training data.",
            ),
            (
                "Explain the role of the penalty constant C in a soft-margin {keyword}.",
                "C prices margin violations. A small C tolerates misclassified or in-margin points and yields a wider, smoother margin; a large C punishes violations hard, narrowing the margin and tracking the training data more closely, which risks overfitting.",
            ),
            (
                "What does the kernel trick buy a {keyword}?",
                "It evaluates inner products in a high-dimensional feature space without constructing the mapping, so a linear margin there becomes a nonlinear boundary in the original space. Training only needs the kernel matrix of pairwise similarities.",
            ),
            (
                "Why is feature scaling important before training a {keyword}?",
                "Both the margin geometry and kernels like RBF depend on distances. Unscaled features distort those distances, so one wide-range feature dominates the kernel and the optimizer converges slowly or to a poor boundary.",
            ),
        ),
    ),
    TopicSpec(
        name="linear regression",
        aliases=("linear regression", "regression", "least squares", "ridge regression", "ordinary least squares"),
        tasks={
            "Easy": (
                "fit a straight-line relationship and predict a numeric target",
                "estimate coefficients with the normal equations",
                "model a numeric outcome from several input columns",
            ),
            "Medium": (
                "compare closed-form and gradient-descent fits of the same model",
                "add L2 regularization and trace the coefficient shrinkage path",
                "engineer polynomial features and guard against overfitting",
            ),
            "Hard": (
                "implement iteratively reweighted fitting that is robust to outliers",
                "fit with mini-batch gradient descent under a strict epoch budget",
                "derive the bias-variance decomposition empirically for this model",
            ),
        },
        hypers=(
            "the closed-form normal equations",
            "batch gradient descent with learning rate 0.01",
            "mini-batches of 32 rows",
            "an L2 penalty of 0.1",
            "an L2 penalty of 1.0",
            "polynomial features of degree 2",
            "early stopping on a validation split",
            "Huber loss with delta 1.0",
        ),
        answer_code=(
            "import numpy as np\n"
            "def fit(X, y, l2=0.0):\n"
            "    Xb = np.hstack([X, np.ones((len(X), 1))])\n"
            "    A = Xb.T @ Xb + l2 * np.eye(Xb.shape[1])\n"
            "    return np.linalg.solve(A, Xb.T @ y)"
        ),
        answer_notes=(
            "an intercept column must be appended; the solve must not invert explicitly when "
            "a linear solve suffices; residual plots justify the fit."
        ),
        viva=(
            (
                "What assumptions does {keyword} make about the residuals?",
                "Residuals should be independent, centered at zero, and have constant variance across the fitted range; for inference they are also assumed roughly normal. Violations such as funnel-shaped residuals signal heteroscedasticity and make the usual errors untrustworthy.",
            ),
            (
                "Why can strongly correlated input features destabilize {keyword}?",
                "Collinearity makes the normal-equation matrix nearly singular, so coefficients become huge, opposite-signed, and extremely sensitive to noise. Predictions may stay fine, but individual coefficients lose meaning; ridge regularization restores stability.",
            ),
            (
                "When do you need gradient descent instead of the closed form for {keyword}?",
                "When the feature matrix is too large to factor, when data arrives as a stream, or when the loss is modified (robust losses, elastic penalties) so no closed form exists. Otherwise the normal equations or a QR solve are exact and simpler.",
            ),
            (
                "How does an L2 penalty change the {keyword} solution?",
                "It adds lambda times the identity to the Gram matrix, shrinking all coefficients toward zero, trading a little bias for lower variance. Geometrically it prefers many small coefficients over a few extreme ones and guarantees the system is solvable.",
            ),
        ),
    ),
    TopicSpec(
        name="logistic regression",
        aliases=("logistic regression", "logit model", "binary classifier regression"),
        tasks={
            "Easy": (
                "classify two classes with a sigmoid over a linear score",
                "predict class probabilities rather than hard labels",
                "fit a linear decision boundary by maximizing likelihood",
            ),
            "Medium": (
                "compare batch and stochastic gradient training curves",
                "calibrate the decision threshold for an imbalanced dataset",
                "add L2 regularization and study coefficient shrinkage",
            ),
            "Hard": (
                "implement second-order Newton updates with line search",
                "extend the model to multinomial softmax classification",
                "train under class-weighted loss and audit per-class errors",
            ),
        },
        hypers=(
            "learning rate 0.1",
            "learning rate 0.01",
            "an L2 penalty of 0.01",
            "an L2 penalty of 0.1",
            "full-batch gradient ascent",
            "stochastic updates with batch size 16",
            "Newton-Raphson updates",
            "a decision threshold of 0.4",
        ),
        answer_code=(
            "import numpy as np\n"
            "def sigmoid(z):\n"
            "    return 1.0 / (1.0 + np.exp(-z))\n"
            "def step(w, X, y, lr, l2):\n"
            "    p = sigmoid(X @ w)\n"
            "    grad = X.T @ (p - y) / len(y) + l2 * w\n"
            "    return w - lr * grad"
        ),
        answer_notes=(
            "the gradient is X transpose times the probability error; log-loss must decrease "
            "over epochs; probabilities need clipping before taking logs."
        ),
        viva=(
            (
                "Why does {keyword} optimize log-loss instead of squared error?",
                "Log-loss is the negative log-likelihood of the Bernoulli model, so minimizing it is maximum likelihood. It is convex for this model while squared error on sigmoid outputs is not, and it punishes confident wrong predictions much more sharply.",
            ),
            (
                "How do you read a coefficient of a trained {keyword}?",
                "Each unit increase in the feature adds the coefficient to the log-odds, multiplying the odds by its exponential with everything else fixed. Sign gives direction, magnitude gives strength on the odds scale, not on the probability scale directly.",
            ),
            (
                "What happens to {keyword} when the classes are perfectly separable?",
                "The likelihood keeps improving as coefficients grow without bound, so the optimizer diverges and probabilities saturate at zero or one. Regularization or a prior bounds the coefficients and restores a finite, calibrated solution.",
            ),
            (
                "How would you adapt {keyword} to a heavily imbalanced dataset?",
                "Reweight the loss so minority errors cost more, or resample the training data, and move the decision threshold using precision-recall analysis instead of accuracy. The probability outputs also need recalibration after resampling.",
            ),
        ),
    ),
    TopicSpec(
        name="convolutional neural network",
        aliases=("cnn", "convolutional neural network", "convnet", "convolution network", "image classifier network"),
        tasks={
            "Easy": (
                "classify small images with two convolution blocks",
                "learn translation-robust features from pixel grids",
                "distinguish image classes with a compact convolutional stack",
            ),
            "Medium": (
                "compare average and max pooling in an otherwise fixed network",
                "add batch normalization and measure its effect on convergence",
                "apply data augmentation and quantify the generalization gain",
            ),
            "Hard": (
                "implement the convolution forward and backward passes by hand",
                "visualize learned filters and activation maps for a probe image",
                "distill the network into a half-size student without losing accuracy",
            ),
        },
        hypers=(
            "3x3 kernels",
            "5x5 kernels",
            "16 then 32 feature maps",
            "stride 2 downsampling",
            "max pooling after each block",
            "dropout of 0.25 before the head",
            "batch size 64 for 10 epochs",
            "the Adam optimizer at 0.001",
        ),
        answer_code=(
            "import numpy as np\n"
            "def conv2d(image, kernels, stride=1):\n"
            "    # slide each kernel over the image, accumulate dot products into feature maps\n"
            "    ...\n"
            "def forward(x):\n"
            "    # conv -> relu -> pool, twice, then flatten into a linear softmax head\n"
            "    ..."
        ),
        answer_notes=(
            "kernel sliding must respect stride and padding arithmetic; pooling reduces spatial "
            "size only; parameter counts should be reported per layer."
        ),
        viva=(
            (
                "Why does weight sharing make a {keyword} efficient on images?",
                "One kernel scans every location, so the parameter count depends on kernel size and channel count rather than image size. The same edge detector works everywhere in the frame, which both shrinks the model and builds in translation robustness.",
            ),
            (
                "What does pooling contribute inside a {keyword}?",
                "It summarizes local neighbourhoods, shrinking the spatial grid so later layers see a wider effective receptive field at lower cost, and it adds small translation invariance since the summary barely moves when the input shifts by a pixel.",
            ),
            (
                "How do receptive fields grow through the layers of a {keyword}?",
                "Each convolution lets a unit see a kernel-sized window of the previous layer, so stacking layers compounds the window: with stride and pooling the growth is multiplicative. Deep units therefore respond to object-scale patterns even with small kernels.",
            ),
            (
                "Why is data augmentation so effective when training a {keyword}?",
                "Flips, crops, and small color shifts generate label-preserving variants, teaching the network invariances the architecture does not already encode. It acts as a regularizer, widening the effective dataset and narrowing the train-test gap.",
            ),
        ),
    ),
    TopicSpec(
        name="recurrent neural network",
        aliases=("rnn", "recurrent neural network", "sequence network", "elman network"),
        tasks={
            "Easy": (
                "predict the next token of a short symbolic sequence",
                "classify variable-length sequences with a recurrent state",
                "carry information across time steps with a hidden state",
            ),
            "Medium": (
                "compare one-hot and learned embeddings feeding the recurrence",
                "add gradient clipping and show the training curves stabilize",
                "evaluate how performance decays with growing sequence length",
            ),
            "Hard": (
                "implement backpropagation through time from scratch",
                "demonstrate and then mitigate the vanishing gradient effect",
                "train with teacher forcing and compare free-running generation",
            ),
        },
        hypers=(
            "a hidden state of 32 units",
            "a hidden state of 64 units",
            "tanh activations",
            "sequence length 20",
            "gradient clipping at norm 5",
            "a learned 16-dim embedding",
            "teacher forcing ratio 0.5",
            "one recurrent layer",
        ),
        answer_code=(
            "import numpy as np\n"
            "def rnn_step(x, h, Wx, Wh, b):\n"
            "    return np.tanh(x @ Wx + h @ Wh + b)\n"
            "def forward(seq, h0, params):\n"
            "    # fold rnn_step over the sequence, collect hidden states for the loss\n"
            "    ..."
        ),
        answer_notes=(
            "the same weights apply at every step; gradients flow backward through time and "
            "must be clipped; the final or pooled hidden state feeds the output layer."
        ),
        viva=(
            (
                "Why do gradients vanish or explode when training a {keyword}?",
                "Backpropagation through time multiplies by the recurrent Jacobian once per step, so its singular values compound exponentially. Values below one shrink gradients toward zero, values above one blow them up; clipping and gating are the standard defenses.",
            ),
            (
                "What does parameter sharing across time give a {keyword}?",
                "One transition function handles sequences of any length, keeps the parameter count independent of sequence length, and encodes the assumption that the dynamics are the same at every position, which is what lets it generalize across time.",
            ),
            (
                "What is teacher forcing when training a {keyword}?",
                "During training the ground-truth previous token is fed in rather than the model's own prediction, stabilizing and accelerating learning. The mismatch at generation time, where the model consumes its own outputs, is exposure bias and motivates scheduled sampling.",
            ),
            (
                "When is a {keyword} preferable to a sliding-window feedforward model?",
                "When the relevant history has unbounded or variable length: the hidden state can in principle summarize everything seen so far, while a window model is blind beyond its fixed span and its parameters grow with the window size.",
            ),
        ),
    ),
    TopicSpec(
        name="long short-term memory",
        aliases=("lstm", "long short term memory", "lstm network", "gated recurrent network", "gru"),
        tasks={
            "Easy": (
                "classify sequences using the final gated memory state",
                "remember a signal across long gaps within a sequence",
                "predict the next value of a noisy periodic series",
            ),
            "Medium": (
                "compare lstm gates against a plain recurrent baseline",
                "study how cell size trades accuracy against overfitting",
                "train on variable-length sequences with proper padding masks",
            ),
            "Hard": (
                "implement the full gate equations and their backward pass",
                "ablate each gate in turn and rank them by damage done",
                "learn a copy task over distance 100 and analyze what made it possible",
            ),
        },
        hypers=(
            "a cell size of 32",
            "a cell size of 64",
            "forget-gate bias initialized to 1",
            "sequence length 50",
            "gradient clipping at norm 1",
            "dropout 0.2 between layers",
            "two stacked recurrent layers",
            "a bidirectional encoder",
        ),
        answer_code=(
            "import numpy as np\n"
            "def lstm_step(x, h, c, P):\n"
            "    z = x @ P.Wx + h @ P.Wh + P.b\n"
            "    i, f, o, g = split_four(z)\n"
            "    c = sigmoid(f) * c + sigmoid(i) * np.tanh(g)\n"
            "    h = sigmoid(o) * np.tanh(c)\n"
            "    return h, c"
        ),
        answer_notes=(
            "the cell state update is additive, which is the whole point; gates are sigmoids "
            "over the concatenated input and hidden state; initialization of the forget bias matters."
        ),
        viva=(
            (
                "How does the cell state of a {keyword} fight the vanishing gradient problem?",
                "The cell state is updated additively, gated by the forget gate, so gradient flows back through a near-identity path instead of repeated matrix multiplications. With the forget gate near one, information and gradient persist across long spans.",
            ),
            (
                "What does each gate in a {keyword} control?",
                "The input gate decides how much of the candidate update enters the cell, the forget gate decides how much of the previous cell survives, and the output gate decides how much of the cell is exposed as the hidden state for this step.",
            ),
            (
                "Why initialize the forget-gate bias of a {keyword} to a positive value?",
                "A positive bias opens the forget gate at the start of training, so the cell retains memory by default. Without it the network begins by erasing its past each step and must first learn to remember before it can learn the task.",
            ),
            (
                "When would a simpler gated unit beat a {keyword}?",
                "With modest data or shorter dependencies, a unit with fewer gates has fewer parameters, trains faster, and often matches accuracy. The full gate set pays off mainly on long sequences and larger training corpora.",
            ),
        ),
    ),
    TopicSpec(
        name="feedforward neural network",
        aliases=("feedforward", "feedforward network", "multilayer perceptron", "mlp", "neural network", "deep neural network", "artificial neural network", "dense network"),
        tasks={
            "Easy": (
                "classify tabular rows with one hidden layer",
                "approximate a nonlinear function with dense layers",
                "map scaled features through two dense layers to class scores",
            ),
            "Medium": (
                "compare relu and tanh activations under identical budgets",
                "tune width versus depth at a fixed parameter count",
                "add early stopping and weight decay, then measure the gap",
            ),
            "Hard": (
                "implement backpropagation by hand and verify it with finite differences",
                "train with both plain and momentum updates and contrast the paths",
                "demonstrate the effect of initialization scale on deep signal flow",
            ),
        },
        hypers=(
            "one hidden layer of 32 units",
            "two hidden layers of 64 units",
            "relu activations",
            "tanh activations",
            "weight decay 1e-4",
            "early stopping with patience 5",
            "He initialization",
            "a softmax output layer",
        ),
        answer_code=(
            "import numpy as np\n"
            "def forward(X, W1, b1, W2, b2):\n"
            "    h = np.maximum(0, X @ W1 + b1)\n"
            "    return h @ W2 + b2\n"
            "def backward(...):\n"
            "    # chain rule layer by layer; verify each gradient with finite differences\n"
            "    ..."
        ),
        answer_notes=(
            "gradients must be checked numerically; losses need a stable softmax; "
            "initialization scale and learning rate dominate whether training works at all."
        ),
        viva=(
            (
                "Why does a {keyword} need nonlinear activations between layers?",
                "A stack of purely linear layers collapses to a single linear map, no matter how deep. The nonlinearity between layers is what lets the network bend the input space and represent functions beyond linear separations.",
            ),
            (
                "Explain backpropagation in a {keyword} in two sentences.",
                "The forward pass caches every layer's inputs; the backward pass applies the chain rule from the loss back through each layer, reusing those caches to compute gradients for every weight. Its cost is proportional to the forward pass, which is what makes training deep models feasible.",
            ),
            (
                "What goes wrong if all weights of a {keyword} start at zero?",
                "Every unit in a layer computes the same output and receives the same gradient, so they all update identically and the layer never diversifies. Symmetry must be broken by random initialization scaled to keep activations in a healthy range.",
            ),
            (
                "How do width and depth trade off in a {keyword}?",
                "Width adds parallel features at one level of abstraction; depth composes features into hierarchies and can represent some functions exponentially more compactly. Deeper models are harder to optimize, which is why normalization and careful initialization matter.",
            ),
        ),
    ),
    TopicSpec(
        name="gradient-based optimizer",
        aliases=("optimizer", "optimizers", "gradient descent", "sgd", "stochastic gradient descent", "adam", "momentum optimization", "optimization techniques"),
        tasks={
            "Easy": (
                "minimize a convex bowl function from several start points",
                "fit a tiny model by following the negative gradient",
                "trace the loss curve of plain gradient descent",
            ),
            "Medium": (
                "race plain, momentum, and adaptive updates on one landscape",
                "study how the learning rate changes convergence and divergence",
                "add a decay schedule and show where it beats a fixed rate",
            ),
            "Hard": (
                "implement the bias-corrected adaptive moment update from its equations",
                "diagnose pathological curvature on an ill-conditioned valley",
                "prove empirically that momentum accelerates along low-curvature directions",
            ),
        },
        hypers=(
            "learning rate 0.1",
            "learning rate 0.01",
            "momentum 0.9",
            "a cosine decay schedule",
            "a step decay schedule",
            "batch size 32",
            "gradient clipping at norm 1",
            "weight decay 1e-4",
        ),
        answer_code=(
            "import numpy as np\n"
            "def sgd_step(w, grad, lr):\n"
            "    return w - lr * grad\n"
            "def momentum_step(w, v, grad, lr, beta):\n"
            "    v = beta * v + grad\n"
            "    return w - lr * v, v"
        ),
        answer_notes=(
            "the loss curve must be plotted per update rule; divergence at large learning "
            "rates should be demonstrated, not just asserted; seeds fixed for comparability."
        ),
        viva=(
            (
                "Why does momentum speed up a {keyword} in narrow valleys?",
                "Gradients along the valley floor point consistently in one direction and accumulate in the velocity, while oscillating side-to-side components cancel. The net effect is faster progress along low-curvature directions and damped zigzagging across steep ones.",
            ),
            (
                "What problem do adaptive per-parameter learning rates solve in a {keyword}?",
                "Parameters receive gradients of very different scales, so one global rate is either too hot for some or too cold for others. Scaling each update by a running estimate of gradient magnitude equalizes progress and removes most manual tuning.",
            ),
            (
                "How does batch size interact with the learning rate in a {keyword}?",
                "Smaller batches inject more gradient noise, which regularizes but caps the stable learning rate; larger batches average the noise away and tolerate, and often need, larger rates. The noise scale is roughly the rate divided by the batch size.",
            ),
            (
                "Why is bias correction needed in adaptive moment estimation for a {keyword}?",
                "The running first and second moment estimates start at zero, so early averages are biased low. Dividing by one minus beta to the power t inflates early estimates to be unbiased, preventing oversized steps in the first iterations.",
            ),
        ),
    ),
)

GENERIC_TASKS = {
    "Easy": (
        "implement and evaluate the core algorithm end to end",
        "build a minimal working version and measure its quality",
    ),
    "Medium": (
        "implement the method and compare two reasonable configurations",
        "build the method and analyze where it succeeds and fails",
    ),
    "Hard": (
        "implement the method from first principles and stress-test it",
        "build an optimized implementation and document its limits",
    ),
}

GENERIC_HYPERS = (
    "sensible default settings",
    "a configuration you tune and justify",
    "two contrasting configurations",
    "a fixed random seed of 7",
)

GENERIC_ANSWER_CODE = (
    "# Sketch: load the data, implement the core routine as pure functions,\n"
    "# fit on the training split, score on the held-out split, print metrics.\n"
    "import numpy as np\n"
    "def fit(X, y):\n"
    "    ...\n"
    "def predict(model, X):\n"
    "    ..."
)

GENERIC_ANSWER_NOTES = (
    "the submission must define the core routine itself rather than importing it, "
    "evaluate on unseen data, and report the requested metric."
)

GENERIC_VIVA = (
    (
        "Walk through your {keyword} solution: what are its main stages and why are they ordered that way?",
        "A sound answer names data loading and preprocessing, the core fitting routine, and held-out evaluation, and explains that evaluation must come after fitting on disjoint data to measure generalization rather than memorization.",
    ),
    (
        "How would you verify that your {keyword} implementation is actually correct?",
        "Check invariants on toy inputs with known answers, compare against a trusted library on the same data, and write unit tests for the helper functions; matching a reference within tolerance on multiple datasets is the strongest evidence.",
    ),
    (
        "What would change in your {keyword} approach if the dataset were one hundred times larger?",
        "Memory and runtime become the constraints: switch to streaming or mini-batch processing, vectorize or parallelize the inner loops, subsample for hyperparameter search, and monitor that quality metrics remain stable as data scales.",
    ),
    (
        "Which single hyperparameter of your {keyword} solution matters most and how did you choose it?",
        "A good answer names the dominant knob, explains its bias-variance or convergence role, and describes selecting it with a validation split or cross-validation rather than the test set.",
    ),
)

_ALIAS_INDEX: dict[str, TopicSpec] = {}
for _topic in TOPICS:
    for _alias in _topic.aliases:
        _ALIAS_INDEX[_alias] = _topic


def find_topic(keyword: str) -> TopicSpec | None:
    """Resolve a faculty keyword to a bank topic, or None for the fallback."""
    normalized = normalize_keyword(keyword)
    if not normalized:
        return None
    if normalized in _ALIAS_INDEX:
        return _ALIAS_INDEX[normalized]
    for alias, topic in _ALIAS_INDEX.items():
        if alias in normalized or normalized in alias:
            return topic
    return None
